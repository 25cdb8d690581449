//! Integer matrices: Smith and Hermite normal forms with unimodular
//! transforms, integral kernels.

pub type IMatrix = Vec<Vec<i64>>;

pub fn identity(n: usize) -> IMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> IMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner, "dimension mismatch");
            (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect()
        })
        .collect()
}

pub fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    // returns (g, x, y) with a x + b y = g >= 0
    let (mut r0, mut r1) = (a, b);
    let (mut x0, mut x1) = (1i64, 0i64);
    let (mut y0, mut y1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (x0, x1) = (x1, x0 - q * x1);
        (y0, y1) = (y1, y0 - q * y1);
    }
    if r0 < 0 {
        (-r0, -x0, -y0)
    } else {
        (r0, x0, y0)
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    extended_gcd(a, b).0
}

/// `u * a * v = diag(divisors)` with `u`, `v` unimodular and each divisor
/// dividing the next.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IMatrix,
    pub v: IMatrix,
    pub divisors: Vec<i64>,
    pub diagonal: IMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.divisors.iter().filter(|&&d| d != 0).count()
    }
}

pub fn smith_normal_form(a: &[Vec<i64>]) -> SmithForm {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut d: IMatrix = a.to_vec();
    let mut u = identity(m);
    let mut v = identity(n);

    let row_op = |mat: &mut IMatrix, dst: usize, src: usize, q: i64| {
        for j in 0..mat[dst].len() {
            let s = mat[src][j];
            mat[dst][j] -= q * s;
        }
    };
    let col_op = |mat: &mut IMatrix, dst: usize, src: usize, q: i64| {
        for row in mat.iter_mut() {
            let s = row[src];
            row[dst] -= q * s;
        }
    };

    'outer: for t in 0..m.min(n) {
        loop {
            let pivot = (t..m)
                .flat_map(|i| (t..n).map(move |j| (i, j)))
                .filter(|&(i, j)| d[i][j] != 0)
                .min_by_key(|&(i, j)| d[i][j].abs());
            let Some((pi, pj)) = pivot else {
                break 'outer;
            };
            d.swap(t, pi);
            u.swap(t, pi);
            for row in d.iter_mut() {
                row.swap(t, pj);
            }
            for row in v.iter_mut() {
                row.swap(t, pj);
            }

            let mut clean = true;
            for i in t + 1..m {
                let q = d[i][t] / d[t][t];
                if q != 0 {
                    row_op(&mut d, i, t, q);
                    row_op(&mut u, i, t, q);
                }
                clean &= d[i][t] == 0;
            }
            for j in t + 1..n {
                let q = d[t][j] / d[t][t];
                if q != 0 {
                    col_op(&mut d, j, t, q);
                    col_op(&mut v, j, t, q);
                }
                clean &= d[t][j] == 0;
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| d[i][j] % d[t][t] != 0));
            if let Some(i) = bad {
                row_op(&mut d, t, i, -1);
                row_op(&mut u, t, i, -1);
                continue;
            }
            break;
        }
        if d[t][t] < 0 {
            for x in d[t].iter_mut() {
                *x = -*x;
            }
            for x in u[t].iter_mut() {
                *x = -*x;
            }
        }
    }
    let divisors = (0..m.min(n)).map(|i| d[i][i]).collect();
    SmithForm { u, v, divisors, diagonal: d }
}

/// Row-style Hermite normal form: `(h, t)` with `t * a = h`, `t` unimodular,
/// `h` in echelon form with positive pivots and reduced entries above them.
pub fn hermite_normal_form(a: &[Vec<i64>]) -> (IMatrix, IMatrix) {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut h: IMatrix = a.to_vec();
    let mut t = identity(m);
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        // gather the gcd of column c (rows r..) into row r
        for i in r + 1..m {
            if h[i][c] == 0 {
                continue;
            }
            let (g, x, y) = extended_gcd(h[r][c], h[i][c]);
            let (p, q) = (h[r][c] / g, h[i][c] / g);
            for mat in [&mut h, &mut t] {
                for j in 0..mat[r].len() {
                    let (a_r, a_i) = (mat[r][j], mat[i][j]);
                    mat[r][j] = x * a_r + y * a_i;
                    mat[i][j] = -q * a_r + p * a_i;
                }
            }
        }
        if h[r][c] == 0 {
            continue;
        }
        if h[r][c] < 0 {
            for mat in [&mut h, &mut t] {
                for x in mat[r].iter_mut() {
                    *x = -*x;
                }
            }
        }
        let piv = h[r][c];
        for i in 0..r {
            let q = h[i][c].div_euclid(piv);
            if q != 0 {
                for mat in [&mut h, &mut t] {
                    for j in 0..mat[i].len() {
                        let s = mat[r][j];
                        mat[i][j] -= q * s;
                    }
                }
            }
        }
        r += 1;
    }
    (h, t)
}

/// Lattice basis of `{x in Z^n : a x = 0}`.
pub fn integer_kernel(a: &[Vec<i64>], n: usize) -> IMatrix {
    if a.is_empty() {
        return identity(n);
    }
    let snf = smith_normal_form(a);
    let rank = snf.rank();
    (rank..n)
        .map(|j| snf.v.iter().map(|row| row[j]).collect())
        .collect()
}

/// Divides out the content of an integer vector.
pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0, |acc, &x| gcd(acc, x));
    if g == 0 {
        return v.to_vec();
    }
    v.iter().map(|x| x / g).collect()
}
