//! Discrete conjugate, conic and circular nets.
//!
//! Nets are finite maps from integer boxes to normalized homogeneous vectors:
//! width 2 for CP¹, 4 for CP³ (and lifts of HP¹ points), 6 for Q⁴.
//! The module covers face planarity, hexahedron completion, real and complex
//! cross-ratio evolution, the correspondence with conic nets in Q²_S, Bianchi
//! permutability on the 4-cube and the holonomy of closed curves.

use std::collections::BTreeMap;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::linalg::{self, CMat, CVec};
use crate::proj4::{
    self, columns, line_factorize, line_meet, quadric_matrix, quadric_pair, wedge, Bivector,
    CVector4,
};
use crate::quat::Quaternion;
use crate::twistor::{is_j_real, twistor_project, HPoint};
use crate::xratio::{complex_cr, complex_fourth_point, steiner_fourth_point, Cp1};
use crate::{GeomError, Result};

/// Normalizes a homogeneous vector: unit norm, first non-negligible coordinate real positive.
pub fn normalize_homogeneous(v: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if n == 0.0 || !n.is_finite() {
        return Err(GeomError::ZeroVector);
    }
    let k = v.iter().position(|c| c.norm() > 1e-10 * n).unwrap_or(0);
    let lead = v[k];
    // already normalized values are returned bit for bit
    if lead.im == 0.0 && lead.re > 0.0 && (n - 1.0).abs() < 1e-14 {
        return Ok(v.to_vec());
    }
    let phase = lead.conj() / (lead.norm() * n);
    let mut out: Vec<Complex64> = v.iter().map(|c| c * phase).collect();
    out[k] = Complex64::new(lead.norm() / n, 0.0);
    Ok(out)
}

/// An elementary 2-face: corners base, base+eᵢ, base+eᵢ+eⱼ, base+eⱼ in cyclic order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Face {
    pub base: Vec<i64>,
    pub i: usize,
    pub j: usize,
}

impl Face {
    pub fn new(base: Vec<i64>, i: usize, j: usize) -> Self {
        Face { base, i, j }
    }

    pub fn corners(&self) -> [Vec<i64>; 4] {
        let mut a = self.base.clone();
        a[self.i] += 1;
        let mut ab = a.clone();
        ab[self.j] += 1;
        let mut b = self.base.clone();
        b[self.j] += 1;
        [self.base.clone(), a, ab, b]
    }
}

/// A lattice map from an axis-aligned integer box to normalized homogeneous vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeNet {
    pub dim: usize,
    /// Number of homogeneous coordinates of each value.
    pub width: usize,
    /// Inclusive lower corner of the domain.
    pub lo: Vec<i64>,
    /// Inclusive upper corner of the domain.
    pub hi: Vec<i64>,
    values: BTreeMap<Vec<i64>, Vec<Complex64>>,
}

impl LatticeNet {
    pub fn new(dim: usize, width: usize, lo: Vec<i64>, hi: Vec<i64>) -> Result<Self> {
        if !(1..=4).contains(&dim)
            || lo.len() != dim
            || hi.len() != dim
            || lo.iter().zip(&hi).any(|(a, b)| a > b)
        {
            return Err(GeomError::Degenerate("invalid lattice domain".into()));
        }
        Ok(LatticeNet {
            dim,
            width,
            lo,
            hi,
            values: BTreeMap::new(),
        })
    }

    pub fn in_domain(&self, idx: &[i64]) -> bool {
        idx.len() == self.dim
            && idx
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (a, b))| a <= x && x <= b)
    }

    /// Stores the normalized value at `idx`.
    pub fn insert(&mut self, idx: Vec<i64>, v: &[Complex64]) -> Result<()> {
        if !self.in_domain(&idx) {
            return Err(GeomError::OutOfDomain(
                idx.iter().map(|&x| x as usize).collect(),
            ));
        }
        if v.len() != self.width {
            return Err(GeomError::Degenerate(format!(
                "value of width {} in a width-{} net",
                v.len(),
                self.width
            )));
        }
        let v = normalize_homogeneous(v)?;
        self.values.insert(idx, v);
        Ok(())
    }

    pub fn get(&self, idx: &[i64]) -> Result<&[Complex64]> {
        if !self.in_domain(idx) {
            return Err(GeomError::OutOfDomain(
                idx.iter().map(|&x| x as usize).collect(),
            ));
        }
        self.values
            .get(idx)
            .map(|v| v.as_slice())
            .ok_or_else(|| GeomError::MissingVertex(idx.iter().map(|&x| x as usize).collect()))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<i64>, &Vec<Complex64>)> {
        self.values.iter()
    }

    /// All elementary 2-faces whose four corners lie in the domain.
    pub fn faces(&self) -> Vec<Face> {
        let mut out = Vec::new();
        for base in self.box_points() {
            for i in 0..self.dim {
                for j in i + 1..self.dim {
                    if base[i] < self.hi[i] && base[j] < self.hi[j] {
                        out.push(Face::new(base.clone(), i, j));
                    }
                }
            }
        }
        out
    }

    /// Every index of the domain box, in lexicographic order.
    pub fn box_points(&self) -> Vec<Vec<i64>> {
        let mut pts = vec![Vec::new()];
        for d in 0..self.dim {
            pts = pts
                .into_iter()
                .flat_map(|p| {
                    (self.lo[d]..=self.hi[d]).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        pts
    }

    pub fn cp1(&self, idx: &[i64]) -> Result<Cp1> {
        let v = self.get(idx)?;
        Ok(Cp1::new(v[0], v[1]))
    }

    pub fn bivector(&self, idx: &[i64]) -> Result<Bivector> {
        Ok(Bivector::from_slice(self.get(idx)?))
    }

    pub fn cvector(&self, idx: &[i64]) -> Result<CVector4> {
        Ok(CVector4::from_slice(self.get(idx)?))
    }

    /// The HP¹ point of a net of ℂ⁴ lifts.
    pub fn hpoint(&self, idx: &[i64]) -> Result<HPoint> {
        twistor_project(&self.cvector(idx)?)
    }
}

fn stack_rows(vs: &[&[Complex64]]) -> CMat {
    CMat::from_fn(vs.len(), vs[0].len(), |r, c| vs[r][c])
}

/// s₄/s₁ of the stacked unit vectors of a face: zero iff the face spans at most a projective plane.
pub fn face_planarity(net: &LatticeNet, face: &Face) -> Result<f64> {
    let c = face.corners();
    let vs = [
        net.get(&c[0])?,
        net.get(&c[1])?,
        net.get(&c[2])?,
        net.get(&c[3])?,
    ];
    Ok(planarity_of(&vs))
}

fn planarity_of(vs: &[&[Complex64]]) -> f64 {
    if vs[0].len() < 4 {
        return 0.0;
    }
    linalg::sv_ratio(&stack_rows(vs), 4)
}

/// Covector of the plane through three points given in a 4-dimensional coordinate space.
fn plane_covector(a: &CVec, b: &CVec, c: &CVec) -> Result<CVec> {
    let m = CMat::from_fn(3, 4, |r, k| [a, b, c][r][k]);
    let ns = linalg::null_space(&m, 1e-9);
    if ns.len() != 1 {
        return Err(GeomError::DegenerateSpan);
    }
    Ok(ns[0].clone())
}

/// The eighth vertex of a combinatorial cube with planar faces, as the meet of the
/// planes through (φ₁, φ₁₂, φ₁₃), (φ₂, φ₁₂, φ₂₃), (φ₃, φ₁₃, φ₂₃).
///
/// The seven points are projected onto the 4-dimensional space they span, so the
/// inputs may live in any ℂⁿ with n ≥ 4 (CP³ or Q⁴ ⊂ CP⁵).
pub fn hexahedron_complete(
    phi: &[Complex64],
    phi1: &[Complex64],
    phi2: &[Complex64],
    phi3: &[Complex64],
    phi12: &[Complex64],
    phi13: &[Complex64],
    phi23: &[Complex64],
) -> Result<Vec<Complex64>> {
    let pts = [phi, phi1, phi2, phi3, phi12, phi13, phi23];
    let n = phi.len();
    if n < 4 || pts.iter().any(|p| p.len() != n) {
        return Err(GeomError::Degenerate(
            "hexahedron needs equal-width vectors of width ≥ 4".into(),
        ));
    }
    let unit: Vec<Vec<Complex64>> = pts
        .iter()
        .map(|p| normalize_homogeneous(p))
        .collect::<Result<_>>()?;
    let m = CMat::from_fn(n, 7, |r, c| unit[c][r]);
    if linalg::sv_ratio(&m, 4) < 1e-9 {
        return Err(GeomError::DegenerateSpan);
    }
    let basis = linalg::dominant_columns(&m, 4);
    let y: Vec<CVec> = unit
        .iter()
        .map(|u| basis.adjoint() * CVec::from_column_slice(u))
        .collect();
    let n1 = plane_covector(&y[1], &y[4], &y[5])?;
    let n2 = plane_covector(&y[2], &y[4], &y[6])?;
    let n3 = plane_covector(&y[3], &y[5], &y[6])?;
    let rows = CMat::from_fn(3, 4, |r, k| [&n1, &n2, &n3][r][k]);
    let (s, v) = linalg::svd_full(&rows);
    if s[2] < 1e-9 * s[0] {
        return Err(GeomError::PlanesNearParallel);
    }
    let x = &basis * v.column(3);
    normalize_homogeneous(x.as_slice())
}

/// Closed form of the eighth vertex in the frame {φ, φ₁, φ₂, φ₃}.
///
/// With φ₁₂ = a₀φ + a₁φ₁ + a₂φ₂, φ₁₃ = b₀φ + b₁φ₁ + b₃φ₃, φ₂₃ = c₀φ + c₂φ₂ + c₃φ₃ and
/// D = a₁b₃c₂ + a₂b₁c₃, the coefficients are
/// y₀ = a₀b₀c₀D, y₁ = a₁b₁c₀(a₀b₃c₂ + a₂b₀c₃ − a₂b₃c₀),
/// y₂ = a₂b₀c₂(a₀b₁c₃ − a₁b₀c₃ + a₁b₃c₀), y₃ = a₀b₃c₃(a₁b₀c₂ + a₂b₁c₀ − a₀b₁c₂).
pub fn hexahedron_closed_form(
    a: [Complex64; 3],
    b: [Complex64; 3],
    c: [Complex64; 3],
) -> Result<[Complex64; 4]> {
    let [a0, a1, a2] = a;
    let [b0, b1, b3] = b;
    let [c0, c2, c3] = c;
    let d = a1 * b3 * c2 + a2 * b1 * c3;
    let y = [
        a0 * b0 * c0 * d,
        a1 * b1 * c0 * (a0 * b3 * c2 + a2 * b0 * c3 - a2 * b3 * c0),
        a2 * b0 * c2 * (a0 * b1 * c3 - a1 * b0 * c3 + a1 * b3 * c0),
        a0 * b3 * c3 * (a1 * b0 * c2 + a2 * b1 * c0 - a0 * b1 * c2),
    ];
    let scale = [a0, a1, a2, b0, b1, b3, c0, c2, c3]
        .iter()
        .map(|x| x.norm())
        .fold(0.0, f64::max);
    if y.iter().all(|x| x.norm() <= 1e-12 * scale.powi(4)) {
        return Err(GeomError::PlanesNearParallel);
    }
    Ok(y)
}

/// The coefficient block as commonly printed, kept for reference only.
///
/// It does not satisfy the plane conditions: on φᵢⱼ = φ + φᵢ + φⱼ it gives [2:3:3:3]
/// while the three planes meet at [2:1:1:1]. Use [`hexahedron_closed_form`].
pub fn printed_hexahedron_coefficients(
    a: [Complex64; 3],
    b: [Complex64; 3],
    c: [Complex64; 3],
) -> [Complex64; 4] {
    let [a0, a1, a2] = a;
    let [b0, b1, b3] = b;
    let [c0, c2, c3] = c;
    [
        a0 * b0 * c0 * (1.0 / (a2 * b1 * c3) + 1.0 / (a1 * b3 * c2)),
        b0 * c0 / (b3 * c2) + a0 * c0 / (a2 * c3) + c0 * c0 / (c2 * c3),
        a0 * b0 / (a1 * b3) + b0 * c0 / (b1 * c3) + b0 * b0 / (b1 * b3),
        a0 * c0 / (a1 * c2) + a0 * b0 / (a2 * b1) + a0 * a0 / (a1 * a2),
    ]
}

/// Hexahedron completion through [`hexahedron_closed_form`], for cross-checking.
pub fn hexahedron_by_formula(
    phi: &[Complex64],
    phi1: &[Complex64],
    phi2: &[Complex64],
    phi3: &[Complex64],
    phi12: &[Complex64],
    phi13: &[Complex64],
    phi23: &[Complex64],
) -> Result<Vec<Complex64>> {
    let frame = CMat::from_columns(&[phi, phi1, phi2, phi3].map(CVec::from_column_slice));
    if linalg::sv_ratio(&frame, 4) < 1e-9 {
        return Err(GeomError::DegenerateSpan);
    }
    let coords = |x: &[Complex64]| linalg::lstsq(&frame, &CVec::from_column_slice(x));
    let (ka, kb, kc) = (coords(phi12), coords(phi13), coords(phi23));
    let y = hexahedron_closed_form(
        [ka[0], ka[1], ka[2]],
        [kb[0], kb[1], kb[3]],
        [kc[0], kc[2], kc[3]],
    )?;
    let x = &frame * CVec::from_column_slice(&y);
    normalize_homogeneous(x.as_slice())
}

/// One step of the real cross-ratio system: the point x with [a, b, c, x] = λ.
///
/// Writing c = aα + bβ in ℍ² puts a, b, c at ∞, 0, 1, where x = aα(1−λ) + bβ.
pub fn circular_step(a: &HPoint, b: &HPoint, c: &HPoint, lambda: f64) -> Result<HPoint> {
    if !lambda.is_finite() || lambda.abs() < 1e-12 || (lambda - 1.0).abs() < 1e-12 {
        return Err(GeomError::DegenerateLambda);
    }
    let (va, vb, vc) = (a.lift(), b.lift(), c.lift());
    let m = columns(&[va, va.j(), vb, vb.j()]);
    if linalg::sv_ratio(&m, 4) < 1e-10 {
        return Err(GeomError::CoincidentPoints);
    }
    let x = linalg::lstsq(&m, &vc.to_cvec());
    let alpha = va * x[0] + va.j() * x[1];
    let beta = vb * x[2] + vb.j() * x[3];
    let scale = vc.norm();
    if alpha.norm() < 1e-10 * scale || beta.norm() < 1e-10 * scale {
        return Err(GeomError::CoincidentPoints);
    }
    twistor_project(&(alpha * Complex64::new(1.0 - lambda, 0.0) + beta))
}

/// One row of the real cross-ratio system [pₖ₊₁, pₖ, p⁺ₖ, p⁺ₖ₊₁] = λₖ, starting at p⁺₀ = seed.
pub fn evolve_circular(curve: &[HPoint], seed: &HPoint, lambdas: &[f64]) -> Result<Vec<HPoint>> {
    if curve.is_empty() || lambdas.len() + 1 != curve.len() {
        return Err(GeomError::Degenerate(
            "need one real cross-ratio per curve edge".into(),
        ));
    }
    let mut out = vec![*seed];
    for k in 0..lambdas.len() {
        let next = circular_step(&curve[k + 1], &curve[k], &out[k], lambdas[k])?;
        out.push(next);
    }
    Ok(out)
}

/// One row of the complex cross-ratio system [c(k+1), c(k), c⁺(k), c⁺(k+1)] = λ in CP¹.
pub fn evolve_complex_cr(curve: &[Cp1], seed: Cp1, lambda: Complex64) -> Result<Vec<Cp1>> {
    if curve.is_empty() {
        return Err(GeomError::Degenerate("empty curve".into()));
    }
    let mut out = vec![seed];
    for k in 0..curve.len() - 1 {
        let next = complex_fourth_point(curve[k + 1], curve[k], out[k], lambda)?;
        out.push(next);
    }
    Ok(out)
}

/// The 2D circular net with row 0 = `curve`, column 0 = `transversal` and constant real λ.
pub fn circular_net(curve: &[HPoint], transversal: &[HPoint], lambda: f64) -> Result<LatticeNet> {
    check_corner(curve[0].dist(&transversal[0]) < 1e-9)?;
    let (nk, nm) = (curve.len() as i64 - 1, transversal.len() as i64 - 1);
    let mut net = LatticeNet::new(2, 4, vec![0, 0], vec![nk, nm])?;
    let lambdas = vec![lambda; curve.len() - 1];
    let mut row = curve.to_vec();
    for m in 0..=nm {
        if m > 0 {
            row = evolve_circular(&row, &transversal[m as usize], &lambdas)?;
        }
        for (k, p) in row.iter().enumerate() {
            net.insert(vec![k as i64, m], &p.lift().c)?;
        }
    }
    Ok(net)
}

/// The 2D complex cross-ratio net with row 0 = `curve`, column 0 = `transversal`.
pub fn complex_cr_net(curve: &[Cp1], transversal: &[Cp1], lambda: Complex64) -> Result<LatticeNet> {
    check_corner(curve[0].dist(&transversal[0]) < 1e-9)?;
    let (nk, nm) = (curve.len() as i64 - 1, transversal.len() as i64 - 1);
    let mut net = LatticeNet::new(2, 2, vec![0, 0], vec![nk, nm])?;
    let mut row = curve.to_vec();
    for m in 0..=nm {
        if m > 0 {
            row = evolve_complex_cr(&row, transversal[m as usize], lambda)?;
        }
        for (k, p) in row.iter().enumerate() {
            net.insert(vec![k as i64, m], &[p.z, p.w])?;
        }
    }
    Ok(net)
}

fn check_corner(ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(GeomError::Degenerate(
            "curve and transversal must share their first point".into(),
        ))
    }
}

/// A two-sphere S ⊂ HP¹ with a chosen conformal structure: the lift line S = [p ∧ q] and
/// the coordinate z ↦ [pz + q] on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereChart {
    pub s: Bivector,
    pub p: CVector4,
    pub q: CVector4,
}

impl SphereChart {
    /// The complex plane ℂ ∪ {∞} ⊂ HP¹ with its standard coordinate.
    pub fn standard() -> Self {
        Self::from_basis(CVector4::e1(), CVector4::e2()).expect("independent basis")
    }

    pub fn from_basis(p: CVector4, q: CVector4) -> Result<Self> {
        let s = wedge(&p, &q)
            .normalized()
            .map_err(|_| GeomError::DegenerateSpan)?;
        if is_j_real(&s, 1e-8) {
            return Err(GeomError::NotASphere);
        }
        Ok(SphereChart { s, p, q })
    }

    /// A chart on the sphere of a non-real line, using the line's factorization.
    pub fn new(s: &Bivector) -> Result<Self> {
        let (p, q) = line_factorize(s)?;
        Self::from_basis(p, q)
    }

    pub fn point(&self, z: Cp1) -> CVector4 {
        self.p * z.z + self.q * z.w
    }

    /// Coordinate of a point of the line S.
    pub fn parameter(&self, x: &CVector4) -> Cp1 {
        let m = columns(&[self.p, self.q]);
        let c = linalg::lstsq(&m, &x.to_cvec());
        Cp1::new(c[0], c[1])
    }

    /// The twistor fiber over the point with coordinate z, a real point of Q²_S.
    pub fn lift(&self, z: Cp1) -> Bivector {
        let a = self.point(z);
        wedge(&a, &a.j())
            .normalized()
            .expect("fiber of a nonzero point")
    }

    /// Largest of |α∧α|, |α∧S|, |α∧Sj| for a unit α: zero iff α ∈ Q²_S.
    pub fn subquadric_defect(&self, a: &Bivector) -> f64 {
        let Ok(u) = a.normalized() else {
            return f64::INFINITY;
        };
        let sj = self.s.j();
        quadric_pair(&u, &u)
            .norm()
            .max(quadric_pair(&u, &self.s).norm())
            .max(quadric_pair(&u, &sj).norm())
    }
}

/// Propagates a conic net in Q²_S from fibers over a curve and a transversal curve,
/// each new vertex being the Steiner fourth point of its face.
pub fn propagate_qs2(
    chart: &SphereChart,
    curve: &[Cp1],
    transversal: &[Cp1],
    lambda: Complex64,
) -> Result<LatticeNet> {
    check_corner(curve[0].dist(&transversal[0]) < 1e-9)?;
    let (nk, nm) = (curve.len() as i64 - 1, transversal.len() as i64 - 1);
    let mut net = LatticeNet::new(2, 6, vec![0, 0], vec![nk, nm])?;
    for (k, z) in curve.iter().enumerate() {
        net.insert(vec![k as i64, 0], &chart.lift(*z).p)?;
    }
    for (m, z) in transversal.iter().enumerate().skip(1) {
        net.insert(vec![0, m as i64], &chart.lift(*z).p)?;
    }
    for m in 0..nm {
        for k in 0..nk {
            let x = steiner_fourth_point(
                &net.bivector(&[k + 1, m])?,
                &net.bivector(&[k, m])?,
                &net.bivector(&[k, m + 1])?,
                lambda,
            )?;
            net.insert(vec![k + 1, m + 1], &x.p)?;
        }
    }
    Ok(net)
}

/// Lifts a CP¹ net on S to a conic net in Q²_S.
///
/// Vertices on the two coordinate axes through the lower corner become twistor fibers;
/// every further vertex is the Steiner fourth point of its face with that face's own
/// cross-ratio, so the lift meets S exactly in the given net.
pub fn lift_to_qs2(chart: &SphereChart, net: &LatticeNet) -> Result<LatticeNet> {
    if net.width != 2 {
        return Err(GeomError::Degenerate("lift expects a CP¹ net".into()));
    }
    let mut out = LatticeNet::new(net.dim, 6, net.lo.clone(), net.hi.clone())?;
    if net.dim == 1 {
        for (idx, _) in net.iter() {
            out.insert(idx.clone(), &chart.lift(net.cp1(idx)?).p)?;
        }
        return Ok(out);
    }
    if net.dim != 2 {
        return Err(GeomError::Degenerate(
            "lift is defined for curves and 2D nets".into(),
        ));
    }
    let (lo, hi) = (&net.lo, &net.hi);
    for idx in net.box_points() {
        if idx[0] == lo[0] || idx[1] == lo[1] {
            out.insert(idx.clone(), &chart.lift(net.cp1(&idx)?).p)?;
        }
    }
    for m in lo[1]..hi[1] {
        for k in lo[0]..hi[0] {
            let z = [
                net.cp1(&[k + 1, m])?,
                net.cp1(&[k, m])?,
                net.cp1(&[k, m + 1])?,
                net.cp1(&[k + 1, m + 1])?,
            ];
            let lambda = complex_cr(z[0], z[1], z[2], z[3])?;
            let x = steiner_fourth_point(
                &out.bivector(&[k + 1, m])?,
                &out.bivector(&[k, m])?,
                &out.bivector(&[k, m + 1])?,
                lambda,
            )?;
            out.insert(vec![k + 1, m + 1], &x.p)?;
        }
    }
    Ok(out)
}

/// Projects a Q²_S net to CP¹: each line meets S in one point, whose coordinate is returned.
pub fn project_from_qs2(chart: &SphereChart, net: &LatticeNet) -> Result<LatticeNet> {
    if net.width != 6 {
        return Err(GeomError::Degenerate("projection expects a Q⁴ net".into()));
    }
    let mut out = LatticeNet::new(net.dim, 2, net.lo.clone(), net.hi.clone())?;
    for (idx, v) in net.iter() {
        let a = Bivector::from_slice(v);
        if chart.subquadric_defect(&a) > 1e-8 {
            return Err(GeomError::OutsideSubquadric);
        }
        let x = line_meet(&a, &chart.s)?;
        let z = chart.parameter(&x);
        out.insert(idx.clone(), &[z.z, z.w])?;
    }
    Ok(out)
}

/// The conic cut from Q⁴ by the plane of one face.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceConic {
    pub face: Face,
    /// Orthonormal 6×3 basis of the face plane.
    pub plane: CMat,
    /// The quadric form restricted to the plane.
    pub form: CMat,
    pub det: Complex64,
    pub irreducible: bool,
    pub planarity: f64,
}

/// Per-face conic report of a Q⁴ net.
pub fn is_conic_net(net: &LatticeNet) -> Result<Vec<FaceConic>> {
    if net.width != 6 {
        return Err(GeomError::Degenerate(
            "conic report expects a Q⁴ net".into(),
        ));
    }
    let g = quadric_matrix();
    let mut out = Vec::new();
    for face in net.faces() {
        let c = face.corners();
        let vs = [
            net.get(&c[0])?,
            net.get(&c[1])?,
            net.get(&c[2])?,
            net.get(&c[3])?,
        ];
        let m = CMat::from_fn(6, 4, |r, k| vs[k][r]);
        let plane = linalg::dominant_columns(&m, 3);
        let form = plane.transpose() * &g * &plane;
        let det = form.determinant();
        out.push(FaceConic {
            irreducible: det.norm() > 1e-8,
            face,
            plane,
            form,
            det,
            planarity: planarity_of(&vs),
        });
    }
    Ok(out)
}

/// Fills the 4-cube from φ, φᵢ, φᵢⱼ by hexahedron completion.
///
/// Vertex v has bit d set when shifted in direction d; entries with three or more bits are ignored.
pub fn complete_hypercube(init: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>> {
    if init.len() != 16 {
        return Err(GeomError::Degenerate("a 4-cube has 16 vertices".into()));
    }
    let mut pts = init.to_vec();
    for top in [0b0111usize, 0b1011, 0b1101, 0b1110, 0b1111] {
        let dirs: Vec<usize> = (0..4)
            .filter(|&d| top & (1 << d) != 0)
            .take(3)
            .map(|d| 1 << d)
            .collect();
        let base = top & !(dirs[0] | dirs[1] | dirs[2]);
        pts[top] = cube_top(&pts, base, [dirs[0], dirs[1], dirs[2]])?;
    }
    Ok(pts)
}

fn cube_top(pts: &[Vec<Complex64>], base: usize, d: [usize; 3]) -> Result<Vec<Complex64>> {
    hexahedron_complete(
        &pts[base],
        &pts[base | d[0]],
        &pts[base | d[1]],
        &pts[base | d[2]],
        &pts[base | d[0] | d[1]],
        &pts[base | d[0] | d[2]],
        &pts[base | d[1] | d[2]],
    )
}

/// True iff all 24 two-faces of the 4-cube are planar and every 3-cube's top vertex
/// agrees with the hexahedron completion of its other seven, within `tol`.
pub fn bianchi_check(hypercube: &[Vec<Complex64>], tol: f64) -> bool {
    if hypercube.len() != 16 {
        return false;
    }
    for base in 0..16usize {
        for i in 0..4 {
            for j in i + 1..4 {
                let (bi, bj) = (1 << i, 1 << j);
                if base & (bi | bj) != 0 {
                    continue;
                }
                let face = [
                    &hypercube[base][..],
                    &hypercube[base | bi],
                    &hypercube[base | bi | bj],
                    &hypercube[base | bj],
                ];
                if planarity_of(&face) > tol {
                    return false;
                }
            }
        }
    }
    for fixed in 0..4 {
        let dirs: Vec<usize> = (0..4).filter(|&d| d != fixed).map(|d| 1 << d).collect();
        for side in [0, 1 << fixed] {
            let top = side | dirs[0] | dirs[1] | dirs[2];
            match cube_top(hypercube, side, [dirs[0], dirs[1], dirs[2]]) {
                Ok(x) if proj4::projective_distance(&x, &hypercube[top]) <= tol => {}
                _ => return false,
            }
        }
    }
    true
}

/// Per-edge Möbius map c⁺(k) ↦ c⁺(k+1) of the complex cross-ratio step, normalized as
/// M = I + λ·u·vᵀ/d with u = c(k+1), vᵀx = det(c(k), x), d = det(c(k+1), c(k)); det M = 1 − λ.
pub fn edge_matrix(ck: Cp1, ck1: Cp1, lambda: Complex64) -> Result<Matrix2<Complex64>> {
    let d = ck1.z * ck.w - ck.z * ck1.w;
    if d.norm() <= 1e-10 * ck.norm() * ck1.norm() {
        return Err(GeomError::CoincidentPoints);
    }
    let u = Vector2::new(ck1.z, ck1.w);
    let v = Vector2::new(-ck.w, ck.z);
    Ok(Matrix2::identity() + u * v.transpose() * (lambda / d))
}

/// Holonomy of the complex cross-ratio evolution around a closed curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Holonomy {
    /// M_{n−1}···M₀ with each factor normalized by [`edge_matrix`].
    pub matrix: Matrix2<Complex64>,
    /// Equals (1 − λ)ⁿ under the per-edge normalization.
    pub det: Complex64,
    pub eigenvalues: Vec<Complex64>,
    /// Seeds whose evolution closes up.
    pub eigenlines: Vec<Cp1>,
    /// Set when the two eigenvalues coincide and only one eigenline exists.
    pub parabolic: bool,
}

/// Holonomy of the closed curve c₀, …, c_{n−1} (a repeated final point is dropped).
pub fn holonomy(closed_curve: &[Cp1], lambda: Complex64) -> Result<Holonomy> {
    let mut c = closed_curve.to_vec();
    if c.len() > 1 && c[0].dist(c.last().expect("nonempty")) < 1e-12 {
        c.pop();
    }
    if c.len() < 3 {
        return Err(GeomError::Degenerate(
            "closed curve needs at least three points".into(),
        ));
    }
    let n = c.len();
    let mut h = Matrix2::identity();
    for k in 0..n {
        h = edge_matrix(c[k], c[(k + 1) % n], lambda)? * h;
    }
    let tr = h[(0, 0)] + h[(1, 1)];
    let det = h.determinant();
    let disc = (tr * tr - det * 4.0).sqrt();
    let parabolic = disc.norm() <= 1e-9 * tr.norm().max(det.norm().sqrt()).max(1e-300);
    let mus = if parabolic {
        vec![tr / 2.0]
    } else {
        vec![(tr + disc) / 2.0, (tr - disc) / 2.0]
    };
    let mut eigenlines = Vec::new();
    for &mu in &mus {
        let v1 = Cp1::new(h[(0, 1)], mu - h[(0, 0)]);
        let v2 = Cp1::new(mu - h[(1, 1)], h[(1, 0)]);
        let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
        if v.norm() <= 1e-12 * (h.norm() + mu.norm()) {
            return Err(GeomError::Degenerate(
                "holonomy is a multiple of the identity".into(),
            ));
        }
        eigenlines.push(Cp1::new(v.z / v.norm(), v.w / v.norm()));
    }
    Ok(Holonomy {
        matrix: h,
        det,
        eigenvalues: mus,
        eigenlines,
        parabolic,
    })
}

/// Convenience: the HP¹ point of an extended complex number in ℂ ⊂ ℍ.
pub fn cp1_to_hpoint(z: Cp1) -> HPoint {
    HPoint::new(Quaternion::from_complex(z.z), Quaternion::from_complex(z.w))
        .expect("nonzero point")
}
