//! Polyhedral-divisor presentation of the torus action on a hypersurface
//! cone: the exact sequence `0 -> Z^r -F-> Z^N -P-> Z^(N-r) -> 0` with a
//! splitting `s`, the tail cone, the polytopes `Delta_rho` over the rays of
//! the downstairs fan and their support functions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cone::ConeVariety;
use crate::error::{Error, Result};
use crate::families::{FamilyInstance, FamilyKind};
use crate::lattice::{
    extended_gcd, gcd, hermite_normal_form, integer_kernel, mat_mul, primitive, smith_normal_form, IMatrix,
};
use crate::linalg::{mat_vec, to_rational, transpose};
use crate::polyhedra::{fiber_vertices, min_pairing, prune_to_vertices, RationalCone};
use crate::rational::{int, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactSequenceData {
    /// `N x r`, columns are the torus generators in ambient coordinates.
    pub f: IMatrix,
    /// `(N - r) x N`.
    pub p: IMatrix,
    /// `r x N`, `s F = I`.
    pub s: IMatrix,
}

fn is_identity(m: &[Vec<i64>]) -> bool {
    m.iter().enumerate().all(|(i, row)| row.iter().enumerate().all(|(j, &x)| x == i64::from(i == j)))
}

/// Rejects `F` unless it is injective with saturated image.
fn check_saturated(f: &[Vec<i64>]) -> Result<usize> {
    let r = f.first().map_or(0, Vec::len);
    let snf = smith_normal_form(f);
    if snf.rank() < r {
        return Err(Error::InvalidExactSequence(format!("F has rank {} < {r}", snf.rank())));
    }
    if let Some(d) = snf.divisors.iter().find(|&&d| d != 1) {
        return Err(Error::TorsionCokernel(format!("elementary divisor {d}")));
    }
    Ok(r)
}

impl ExactSequenceData {
    /// Validates a user-chosen `(F, P, s)`.
    pub fn from_parts(f: IMatrix, p: IMatrix, s: IMatrix) -> Result<Self> {
        let n = f.len();
        let r = check_saturated(&f)?;
        if p.iter().any(|row| row.len() != n) || s.iter().any(|row| row.len() != n) || s.len() != r {
            return Err(Error::InvalidExactSequence("matrix shapes do not fit".into()));
        }
        if p.len() != n - r {
            return Err(Error::InvalidExactSequence(format!("P has {} rows, expected {}", p.len(), n - r)));
        }
        if !p.is_empty() && mat_mul(&p, &f).iter().flatten().any(|&x| x != 0) {
            return Err(Error::InvalidExactSequence("P F != 0".into()));
        }
        if !is_identity(&mat_mul(&s, &f)) {
            return Err(Error::InvalidExactSequence("s F != I".into()));
        }
        if !p.is_empty() {
            let snf = smith_normal_form(&p);
            if snf.rank() != n - r || snf.divisors.iter().any(|&d| d != 1) {
                return Err(Error::InvalidExactSequence("P is not surjective".into()));
            }
        }
        Ok(ExactSequenceData { f, p, s })
    }

    pub fn rank(&self) -> usize {
        self.s.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.f.len()
    }

    /// `P` in Hermite form, and each row of `s` reduced modulo the rows of `P`.
    pub fn canonicalized(&self) -> Self {
        if self.p.is_empty() {
            return self.clone();
        }
        let (h, _) = hermite_normal_form(&self.p);
        let mut s = self.s.clone();
        for row in &h {
            let Some(c) = row.iter().position(|&x| x != 0) else {
                continue;
            };
            for srow in s.iter_mut() {
                let k = srow[c].div_euclid(row[c]);
                for (x, y) in srow.iter_mut().zip(row) {
                    *x -= k * y;
                }
            }
        }
        ExactSequenceData { f: self.f.clone(), p: h, s }
    }
}

/// Cokernel and splitting of `F` via the Smith form `U F V = [I; 0]`:
/// `P` is the bottom of `U`, `s = V U_top`. Canonicalized afterwards.
pub fn cokernel_and_splitting(f: &[Vec<i64>]) -> Result<ExactSequenceData> {
    let r = check_saturated(f)?;
    let snf = smith_normal_form(f);
    let top: IMatrix = snf.u[..r].to_vec();
    let p: IMatrix = snf.u[r..].to_vec();
    let s = mat_mul(&snf.v, &top);
    Ok(ExactSequenceData::from_parts(f.to_vec(), p, s)?.canonicalized())
}

/// `sigma = s(F(Q^r) ∩ Q^N_{>=0}) = { y : F y >= 0 }`.
pub fn tail_cone(data: &ExactSequenceData) -> Result<RationalCone> {
    RationalCone::from_inequalities(&to_rational(&data.f), data.rank())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DownstairsRay {
    pub ray: Vec<i64>,
    /// Ambient coordinates whose image under `P` spans this ray.
    pub coordinates: Vec<usize>,
    pub multiplicity: u32,
}

/// The distinct primitive columns of `P`.
pub fn downstairs_rays(data: &ExactSequenceData) -> Vec<DownstairsRay> {
    let mut rays: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for (i, col) in transpose(&data.p).into_iter().enumerate() {
        if col.iter().all(|&x| x == 0) {
            continue;
        }
        rays.entry(primitive(&col)).or_default().push(i);
    }
    rays.into_iter()
        .map(|(ray, coordinates)| DownstairsRay { ray, coordinates, multiplicity: 1 })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polyhedron {
    #[serde(with = "rational_matrix")]
    pub vertices: Vec<Vec<Rational>>,
    pub tail: RationalCone,
}

/// `Delta_rho = s(P^{-1}(rho) ∩ Q^N_{>=0})`.
pub fn delta_polytope(data: &ExactSequenceData, rho: &[i64]) -> Result<Polyhedron> {
    let tail = tail_cone(data)?;
    let p = to_rational(&data.p);
    let rhs: Vec<Rational> = rho.iter().map(|&x| int(x)).collect();
    let fiber = fiber_vertices(&p, &rhs, data.ambient_dim());
    if fiber.is_empty() {
        return Err(Error::EmptyPolyhedron(format!("no nonnegative preimage of {rho:?}")));
    }
    let s = to_rational(&data.s);
    let images = fiber.iter().map(|x| mat_vec(&s, x)).collect();
    let vertices = prune_to_vertices(images, &tail.rational_rays());
    Ok(Polyhedron { vertices, tail })
}

/// `Psi(w) = min over Delta of <w, u>`; the linear pieces are the vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportFunction {
    pub ray: Vec<i64>,
    #[serde(with = "rational_matrix")]
    pub pieces: Vec<Vec<Rational>>,
}

impl SupportFunction {
    pub fn new(ray: &[i64], delta: &Polyhedron) -> Self {
        SupportFunction { ray: ray.to_vec(), pieces: delta.vertices.clone() }
    }

    pub fn eval(&self, w: &[Rational]) -> Rational {
        min_pairing(w, &self.pieces).expect("support function without pieces")
    }

    pub fn is_linear(&self) -> bool {
        self.pieces.len() == 1
    }

    pub fn has_integral_slopes(&self) -> bool {
        self.pieces.iter().flatten().all(Rational::is_integer)
    }

    /// Linear with an integral slope: removable by an integral shift.
    pub fn is_trivial(&self) -> bool {
        self.is_linear() && self.has_integral_slopes()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayDetail {
    pub ray: Vec<i64>,
    pub multiplicity: u32,
    pub pieces: Vec<Vec<String>>,
    pub linear: bool,
    pub integral_slopes: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeReport {
    /// Upper bound on non-product equivariant degenerations.
    pub count_nontrivial_bound: usize,
    /// Distinct nontrivial polytopes after absorbing integral linear parts.
    pub distinct_nontrivial: usize,
    /// Linear support functions with a non-integral slope.
    pub non_integral_slopes: usize,
    pub details: Vec<RayDetail>,
}

/// Two vertex lists differ by one integral translation.
fn integral_translates(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> bool {
    if a.len() != b.len() || a.is_empty() {
        return false;
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort();
    sb.sort();
    let shift: Vec<Rational> = sa[0].iter().zip(&sb[0]).map(|(x, y)| x - y).collect();
    shift.iter().all(Rational::is_integer)
        && sa.iter().zip(&sb).all(|(u, v)| u.iter().zip(v).zip(&shift).all(|((x, y), d)| x - y == *d))
}

/// Counting bound on nontrivial equivariant degenerations.
///
/// Integral linear pieces are trivial; nonlinear polytopes count once per
/// translation class regardless of multiplicity. At most two distinct
/// nontrivial polytopes give that many; otherwise two linear pieces with
/// non-integral slope cap the count at two.
pub fn slope_integrality_report(functions: &[(SupportFunction, u32)]) -> SlopeReport {
    let mut classes: Vec<&SupportFunction> = Vec::new();
    let mut non_integral = 0;
    for (psi, _) in functions {
        if psi.is_trivial() {
            continue;
        }
        if psi.is_linear() {
            non_integral += 1;
        } else if !classes.iter().any(|c| integral_translates(&c.pieces, &psi.pieces)) {
            classes.push(psi);
        }
    }
    let distinct = classes.len() + non_integral;
    let bound = if distinct <= 2 || non_integral < 2 { distinct } else { 2 };
    let details = functions
        .iter()
        .map(|(psi, mult)| RayDetail {
            ray: psi.ray.clone(),
            multiplicity: *mult,
            pieces: psi.pieces.iter().map(|v| v.iter().map(ToString::to_string).collect()).collect(),
            linear: psi.is_linear(),
            integral_slopes: psi.has_integral_slopes(),
        })
        .collect();
    SlopeReport { count_nontrivial_bound: bound, distinct_nontrivial: distinct, non_integral_slopes: non_integral, details }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayData {
    pub ray: DownstairsRay,
    pub delta: Polyhedron,
    pub psi: SupportFunction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PDivisorPresentation {
    pub data: ExactSequenceData,
    pub tail_cone: RationalCone,
    pub dual_cone: RationalCone,
    pub rays: Vec<RayData>,
    pub slopes: SlopeReport,
    /// Index of the torus lattice of the input in its saturation.
    pub saturation_index: i64,
}

impl PDivisorPresentation {
    /// Builds every `Delta_rho` and `Psi_rho`; `multiplicity` assigns the
    /// number of base points over each ray.
    pub fn build(data: ExactSequenceData, multiplicity: impl Fn(&DownstairsRay) -> u32) -> Result<Self> {
        let tail_cone = tail_cone(&data)?;
        let dual_cone = tail_cone.dual()?;
        let rays = downstairs_rays(&data)
            .into_iter()
            .map(|mut ray| {
                ray.multiplicity = multiplicity(&ray);
                let delta = delta_polytope(&data, &ray.ray)?;
                let psi = SupportFunction::new(&ray.ray, &delta);
                Ok(RayData { ray, delta, psi })
            })
            .collect::<Result<Vec<_>>>()?;
        let functions: Vec<(SupportFunction, u32)> =
            rays.iter().map(|r| (r.psi.clone(), r.ray.multiplicity)).collect();
        let slopes = slope_integrality_report(&functions);
        Ok(PDivisorPresentation { data, tail_cone, dual_cone, rays, slopes, saturation_index: 1 })
    }

    pub fn ray(&self, rho: &[i64]) -> Option<&RayData> {
        self.rays.iter().find(|r| r.ray.ray == rho)
    }
}

/// `F = W^T` for the torus of `v`.
pub fn inclusion_matrix(v: &ConeVariety) -> IMatrix {
    transpose(v.weights().rows())
}

/// Basis (Hermite form) of `Q F ∩ Z^N` as columns, and the index of the
/// column lattice of `F` in it.
pub fn saturate(f: &[Vec<i64>]) -> Result<(IMatrix, i64)> {
    let n = f.len();
    let r = f.first().map_or(0, Vec::len);
    let snf = smith_normal_form(f);
    if snf.rank() < r {
        return Err(Error::InvalidExactSequence(format!("F has rank {} < {r}", snf.rank())));
    }
    let index = snf.divisors.iter().product();
    let relations = integer_kernel(&transpose(f), n);
    let basis = integer_kernel(&relations, n);
    let (h, _) = hermite_normal_form(&basis);
    Ok((transpose(&h), index))
}

/// Canonical (Smith/Hermite) presentation of the saturated torus; every ray
/// has multiplicity 1.
pub fn presentation_for_variety(v: &ConeVariety) -> Result<PDivisorPresentation> {
    let (f, index) = saturate(&inclusion_matrix(v))?;
    let mut pd = PDivisorPresentation::build(cokernel_and_splitting(&f)?, |_| 1)?;
    pd.saturation_index = index;
    Ok(pd)
}

/// `a, b` with `a q' - b p' = 1`, `0 < a <= p'`, for `p' = p/m`, `q' = q/m`.
pub fn bp_bezout(p: i64, q: i64) -> (i64, i64) {
    let m = gcd(p, q);
    let (pp, qq) = (p / m, q / m);
    let (_, x, _) = extended_gcd(qq, pp);
    let a = (x - 1).rem_euclid(pp) + 1;
    let b = (a * qq - 1) / pp;
    (a, b)
}

/// The Brieskorn–Pham presentation with generators ordered `(e_2, e_1)`,
/// `P = [[0, 0, -p/m, q/m], [1, 1, -p, 0]]`, `s = [[0, 0, a, -b], [1, 0, 0, 0]]`.
/// The ray of `u, v` carries multiplicity `m`.
pub fn bp_presentation(p: i64, q: i64) -> Result<PDivisorPresentation> {
    let m = gcd(p, q);
    let (a, b) = bp_bezout(p, q);
    let f = vec![vec![0, 1], vec![p * q / m, -1], vec![q / m, 0], vec![p / m, 0]];
    let pm = vec![vec![0, 0, -p / m, q / m], vec![1, 1, -p, 0]];
    let s = vec![vec![0, 0, a, -b], vec![1, 0, 0, 0]];
    let data = ExactSequenceData::from_parts(f, pm, s)?;
    PDivisorPresentation::build(data, |r| if r.coordinates == [0, 1] { m as u32 } else { 1 })
}

/// Presentation for a built-in family: the classical one for Brieskorn–Pham,
/// the canonical one otherwise.
pub fn presentation_for_family(fam: &FamilyInstance) -> Result<PDivisorPresentation> {
    match fam.kind() {
        FamilyKind::BrieskornPham => bp_presentation(fam.tag.p, fam.tag.q),
        _ => presentation_for_variety(&fam.variety),
    }
}

/// Checks `P F = 0` and `s F = I`.
pub fn relations_hold(data: &ExactSequenceData) -> bool {
    (data.p.is_empty() || mat_mul(&data.p, &data.f).iter().flatten().all(|&x| x == 0))
        && is_identity(&mat_mul(&data.s, &data.f))
}

/// The integral vector by which two support functions differ, if they differ
/// by an integral linear form.
pub fn integral_shift(a: &SupportFunction, b: &SupportFunction) -> Option<Vec<Rational>> {
    if !integral_translates(&a.pieces, &b.pieces) {
        return None;
    }
    let mut sa = a.pieces.clone();
    let mut sb = b.pieces.clone();
    sa.sort();
    sb.sort();
    Some(sa[0].iter().zip(&sb[0]).map(|(x, y)| x - y).collect())
}

pub fn is_integral(v: &[Rational]) -> bool {
    v.iter().all(Rational::is_integer)
}

mod rational_matrix {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::rational::{parse_rational, Rational};

    pub fn serialize<S: Serializer>(m: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        rows.iter()
            .map(|r| r.iter().map(|x| parse_rational(x).map_err(serde::de::Error::custom)).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::make_family;
    use crate::rational::rat;

    fn v(xs: &[Rational]) -> Vec<Rational> {
        xs.to_vec()
    }

    #[test]
    fn bezout_choice() {
        assert_eq!(bp_bezout(3, 2), (2, 1));
        for (p, q) in [(5, 3), (4, 6), (9, 12), (7, 2)] {
            let (a, b) = bp_bezout(p, q);
            let m = gcd(p, q);
            assert_eq!(a * q / m - b * p / m, 1);
        }
    }

    #[test]
    fn bp32_presentation() {
        let pd = bp_presentation(3, 2).unwrap();
        assert!(relations_hold(&pd.data));
        assert_eq!(pd.tail_cone.rays, vec![vec![1, 0], vec![1, 6]]);
        assert_eq!(pd.dual_cone.rays, vec![vec![0, 1], vec![6, -1]]);
        let uv = pd.ray(&[0, 1]).unwrap();
        assert_eq!(uv.ray.multiplicity, 1);
        assert_eq!(uv.delta.vertices, vec![v(&[int(0), int(0)]), v(&[int(0), int(1)])]);
        let w = [int(5), int(-2)];
        assert_eq!(uv.psi.eval(&w), int(-2));
        assert_eq!(pd.ray(&[1, 0]).unwrap().delta.vertices, vec![v(&[rat(-1, 2), int(0)])]);
        assert_eq!(pd.ray(&[-1, -1]).unwrap().delta.vertices, vec![v(&[rat(2, 3), int(0)])]);
        assert_eq!(pd.slopes.count_nontrivial_bound, 2);
    }

    #[test]
    fn canonical_presentation_agrees_up_to_shear() {
        let classical = bp_presentation(3, 2).unwrap();
        let canonical = PDivisorPresentation::build(
            cokernel_and_splitting(&classical.data.f).unwrap(),
            |_| 1,
        )
        .unwrap();
        assert!(relations_hold(&canonical.data));
        assert_eq!(canonical.data.p, vec![vec![1, 1, 0, -2], vec![0, 0, 3, -2]]);
        assert_eq!(canonical.tail_cone, classical.tail_cone);
        for r in &classical.rays {
            let other = canonical
                .rays
                .iter()
                .find(|c| c.ray.coordinates == r.ray.coordinates)
                .unwrap();
            let shift = integral_shift(&r.psi, &other.psi).expect("integral shift");
            assert!(is_integral(&shift));
        }
        assert_eq!(canonical.slopes.count_nontrivial_bound, 2);
    }

    #[test]
    fn torsion_and_trivial_cases() {
        let doubled = vec![vec![2, 0], vec![0, 1], vec![0, 0]];
        assert!(matches!(cokernel_and_splitting(&doubled), Err(Error::TorsionCokernel(_))));
        let id = vec![vec![1, 0], vec![0, 1]];
        let data = cokernel_and_splitting(&id).unwrap();
        assert!(data.p.is_empty());
        assert_eq!(data.s, id);
        let bad = ExactSequenceData::from_parts(
            vec![vec![0, 1], vec![6, -1], vec![2, 0], vec![3, 0]],
            vec![vec![0, 0, -3, 2], vec![1, 1, -3, 0]],
            vec![vec![0, 0, 1, 0], vec![1, 0, 0, 0]],
        );
        assert!(matches!(bad, Err(Error::InvalidExactSequence(_))));
    }

    #[test]
    fn integral_linear_data_is_trivial() {
        let psi = SupportFunction { ray: vec![1, 0], pieces: vec![v(&[int(2), int(-1)])] };
        let report = slope_integrality_report(&[(psi.clone(), 1), (psi, 3)]);
        assert_eq!(report.count_nontrivial_bound, 0);
    }

    #[test]
    fn integral_slope_is_absorbed() {
        // m = p: am/p is an integer, one linear piece becomes trivial
        let pd = bp_presentation(3, 6).unwrap();
        assert_eq!(pd.ray(&[0, 1]).unwrap().ray.multiplicity, 3);
        assert_eq!(pd.slopes.non_integral_slopes, 1);
        assert_eq!(pd.slopes.count_nontrivial_bound, 2);
    }

    #[test]
    fn other_families_present() {
        for kind in [FamilyKind::YauYuII, FamilyKind::YauYuIII] {
            let fam = make_family(kind, 4, 3).unwrap();
            let pd = presentation_for_family(&fam).unwrap();
            assert!(relations_hold(&pd.data));
            assert_eq!(pd.saturation_index, crate::lattice::gcd(fam.tag.p - 1, fam.tag.q - i64::from(kind == FamilyKind::YauYuIII)));
            for r in &pd.rays {
                assert!(!r.delta.vertices.is_empty());
            }
        }
    }
}
