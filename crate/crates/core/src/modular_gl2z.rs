//! The GL₂(Z) modular complex for Γ₁(N) and Γ(N), its map to the cyclotomic
//! complex, and cuspidal dimensions.

use std::sync::Arc;

use serde::Serialize;

use crate::bloch::{delta2, li11_exact, BlochElem};
use crate::complex::{differential, perm3_sign, present, sum_coords, well_defined, Cell, PresentedChainComplex, WedgeSpace, PERMS3};
use crate::error::{input, Result};
use crate::numberfields::{euler_phi, gcd, is_prime, CycloNum};
use crate::qlinalg::{q, rank_kernel, FormalSum, Presentation, Rational, SparseMatQ};
use crate::qseries::{sp_wedge, ModularSymbol};
use crate::units::{wedge, wedge_sums, CycloUnits, UnitSymbol, Wedge2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationMode {
    /// (c,d) = (εc, ε′d) for independent signs.
    FullUnits,
    /// (c,d) = (εc, εd) only.
    #[serde(rename = "paper-literal")]
    Diagonal,
}

fn md(x: i64, n: u64) -> u64 {
    x.rem_euclid(n as i64) as u64
}

fn edge_gens(n: u64) -> Vec<Cell> {
    let mut v = Vec::new();
    for c in 0..n {
        for d in 0..n {
            if gcd(gcd(c as i64, d as i64), n as i64) == 1 {
                v.push(Cell::Edge([c, d]));
            }
        }
    }
    v
}

fn tri_gens(n: u64) -> Vec<Cell> {
    edge_gens(n).into_iter().map(|e| match e {
        Cell::Edge([c, d]) => Cell::Tri([c, d, md(-(c as i64) - d as i64, n)]),
        _ => unreachable!(),
    }).collect()
}

fn tri_relations(n: u64, g: &Cell) -> Vec<(Cell, i8)> {
    let Cell::Tri(t) = g else { return vec![] };
    let mut out: Vec<(Cell, i8)> = PERMS3.iter().map(|p| (Cell::Tri([t[p[0]], t[p[1]], t[p[2]]]), perm3_sign(*p))).collect();
    out.push((Cell::Tri(t.map(|x| md(-(x as i64), n))), 1));
    out
}

fn edge_relations(n: u64, mode: RelationMode, g: &Cell) -> Vec<(Cell, i8)> {
    let Cell::Edge([c, d]) = *g else { return vec![] };
    let neg = |x: u64| md(-(x as i64), n);
    let mut out = vec![(Cell::Edge([d, c]), -1), (Cell::Edge([neg(c), neg(d)]), 1)];
    if mode == RelationMode::FullUnits {
        out.push((Cell::Edge([neg(c), d]), 1));
        out.push((Cell::Edge([c, neg(d)]), 1));
    }
    out
}

fn cusp_gens(n: u64) -> Vec<Cell> {
    (1..n).map(Cell::CuspInf).chain((1..n).map(Cell::CuspZero)).collect()
}

fn cusp_relations(n: u64, g: &Cell) -> Vec<(Cell, i8)> {
    match *g {
        Cell::CuspInf(b) => vec![(Cell::CuspInf(md(-(b as i64), n)), 1)],
        Cell::CuspZero(b) => vec![(Cell::CuspZero(md(-(b as i64), n)), 1)],
        _ => vec![],
    }
}

/// ∂(c,d,e) = (c,d) + (d,e) + (e,c).
pub fn tri_boundary(g: &Cell) -> Result<FormalSum<Cell>> {
    let Cell::Tri([c, d, e]) = *g else { return input("not a triangle") };
    let mut s = FormalSum::single(Cell::Edge([c, d]));
    s.add_term(Cell::Edge([d, e]), q(1));
    s.add_term(Cell::Edge([e, c]), q(1));
    Ok(s)
}

/// (α,β) ↦ [0,α] − [0,β] for α,β ≠ 0, and (0,β) ↦ −[β,0] + [0,β].
pub fn edge_boundary(g: &Cell) -> Result<FormalSum<Cell>> {
    let Cell::Edge([a, b]) = *g else { return input("not an edge") };
    let mut s = FormalSum::zero();
    match (a, b) {
        (0, 0) => return input("edge (0,0)"),
        (0, b) => {
            s.add_term(Cell::CuspInf(b), q(-1));
            s.add_term(Cell::CuspZero(b), q(1));
        }
        (a, 0) => {
            s.add_term(Cell::CuspInf(a), q(1));
            s.add_term(Cell::CuspZero(a), q(-1));
        }
        (a, b) => {
            s.add_term(Cell::CuspZero(a), q(1));
            s.add_term(Cell::CuspZero(b), q(-1));
        }
    }
    Ok(s)
}

#[derive(Clone, Debug)]
pub struct Gamma1Complex {
    pub level: u64,
    pub mode: RelationMode,
    pub complex: PresentedChainComplex,
}

impl Gamma1Complex {
    pub fn triangles(&self) -> &Presentation<Cell> {
        &self.complex.degrees[0]
    }

    pub fn edges(&self) -> &Presentation<Cell> {
        &self.complex.degrees[1]
    }

    pub fn cusps(&self) -> Option<&Presentation<Cell>> {
        self.complex.degrees.get(2)
    }

    /// Checks that both differentials respect the defining relations.
    pub fn differentials_well_defined(&self) -> Result<bool> {
        let mut ok = well_defined(self.triangles(), self.edges(), tri_boundary)?;
        if let Some(c) = self.cusps() {
            ok &= well_defined(self.edges(), c, edge_boundary)?;
        }
        Ok(ok)
    }
}

/// Coinvariant presentation of triangles → edges (→ cusps) for Γ₁(N) ⊂ GL₂(Z).
pub fn build_gamma1_complex(n: u64, mode: RelationMode, with_cusps: bool) -> Result<Gamma1Complex> {
    if n < 3 {
        return input(format!("level {} < 3 is not supported", n));
    }
    if with_cusps && !is_prime(n) {
        return input(format!("cusp degree is only implemented at prime level, not {}", n));
    }
    let tri = present(tri_gens(n), |g| tri_relations(n, g))?;
    let edge = present(edge_gens(n), |g| edge_relations(n, mode, g))?;
    let d1 = differential(&tri, &edge, tri_boundary)?;
    let mut names = vec!["tri".to_string(), "edge".to_string()];
    let mut degrees = vec![tri, edge];
    let mut diffs = vec![d1];
    if with_cusps {
        let cusp = present(cusp_gens(n), |g| cusp_relations(n, g))?;
        diffs.push(differential(&degrees[1], &cusp, edge_boundary)?);
        degrees.push(cusp);
        names.push("cusp".into());
    }
    Ok(Gamma1Complex { level: n, mode, complex: PresentedChainComplex { names, degrees, diffs, first_degree: 1 } })
}

/// Relation sets for the cyclotomic unit symbols u(α), α ∈ Z/N − 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitRelations {
    ParityOnly,
    ParityAndDistribution,
}

/// Dimension of the span of {u(α)} modulo the chosen relations: an upper bound
/// for the rank of C₁(N) at composite N, exact at prime N.
pub fn cyclo_unit_space_dim(n: u64, rel: UnitRelations) -> usize {
    let levels: Vec<u64> = match rel {
        UnitRelations::ParityOnly => vec![n],
        UnitRelations::ParityAndDistribution => (2..=n).filter(|m| n % m == 0).collect(),
    };
    let mut syms: Vec<(u64, u64)> = Vec::new();
    for &m in &levels {
        for a in 1..m {
            syms.push((m, a));
        }
    }
    let idx = |m: u64, a: u64| syms.iter().position(|s| *s == (m, a)).unwrap();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let mut push = |terms: Vec<(usize, i64)>| {
        let mut r = vec![Rational::from_integer(0.into()); syms.len()];
        for (i, c) in terms {
            r[i] += q(c);
        }
        rows.push(r);
    };
    for &m in &levels {
        for a in 1..m {
            push(vec![(idx(m, a), 1), (idx(m, m - a), -1)]);
        }
        if rel == UnitRelations::ParityOnly {
            continue;
        }
        for &m2 in levels.iter().filter(|&&m2| m2 < m && m % m2 == 0) {
            // u_m(a·m/m2) = u_{m2}(a)
            for a in 1..m2 {
                push(vec![(idx(m, a * (m / m2)), 1), (idx(m2, a), -1)]);
            }
            // Σ_{α ≡ β mod m2} u_m(α) = u_{m2}(β)
            for b in 1..m2 {
                let mut t: Vec<(usize, i64)> = (0..m).filter(|al| al % m2 == b).map(|al| (idx(m, al), 1)).collect();
                t.push((idx(m2, b), -1));
                push(t);
            }
        }
    }
    let rank = if rows.is_empty() { 0 } else { SparseMatQ::from_rows(&rows).rank() };
    // lower-level symbols are spanned by level-n ones through the distribution relations
    syms.len() - rank
}

/// The cyclotomic target at level N: Λ²Ĉ₁(N) and, at prime level, C₁ ⊕ C₁.
pub struct CyclotomicTarget {
    pub level: u64,
    pub lattice: Arc<CycloUnits>,
    pub c1: Vec<UnitSymbol>,
    pub wedge_hat: WedgeSpace<UnitSymbol>,
}

impl CyclotomicTarget {
    pub fn new(n: u64) -> CyclotomicTarget {
        let lattice = CycloUnits::get(n);
        let c1 = lattice.basis_symbols();
        let mut hat = c1.clone();
        hat.push(UnitSymbol::Zero);
        CyclotomicTarget { level: n, lattice, c1, wedge_hat: WedgeSpace::new(hat) }
    }

    /// Indices of Λ²Ĉ₁ coordinates lying in Λ²C₁.
    pub fn wedge_c1_indices(&self) -> Vec<usize> {
        (0..self.wedge_hat.dim()).filter(|&i| self.wedge_hat.pairs[i].1 != UnitSymbol::Zero && self.wedge_hat.pairs[i].0 != UnitSymbol::Zero).collect()
    }

    pub fn u(&self, a: u64) -> FormalSum<UnitSymbol> {
        self.lattice.u(a as i64)
    }

    /// δ′: u(a)∧u(b) ↦ 0 ⊕ (u(a) − u(b)), θ₀∧u(b) ↦ −u(b) ⊕ u(b). Prime level only.
    pub fn delta_prime(&self) -> Result<SparseMatQ> {
        if !is_prime(self.level) {
            return input("δ′ is defined on the symbol basis at prime level only");
        }
        let r = self.c1.len();
        let mut m = SparseMatQ::zeros(2 * r, self.wedge_hat.dim());
        for (j, (a, b)) in self.wedge_hat.pairs.iter().enumerate() {
            let pos = |s: &UnitSymbol| self.c1.iter().position(|x| x == s);
            match (pos(a), pos(b)) {
                (Some(i), Some(k)) => {
                    m.add_to(r + i, j, &q(1));
                    m.add_to(r + k, j, &q(-1));
                }
                // (u(a), θ₀) = −θ₀∧u(a)
                (Some(i), None) => {
                    m.add_to(i, j, &q(1));
                    m.add_to(r + i, j, &q(-1));
                }
                _ => return input("unexpected wedge pair"),
            }
        }
        Ok(m)
    }
}

/// Li₁,₁(ζ^c, ζ^d) for the triangle (c, d, e).
pub fn triangle_li11(n: u64, g: &Cell) -> Result<BlochElem> {
    let Cell::Tri([c, d, _]) = *g else { return input("not a triangle") };
    Ok(li11_exact(&CycloNum::zeta_pow(n, c as i64), &CycloNum::zeta_pow(n, d as i64)))
}

/// Matrices of the map from the Γ₁(N) complex to the cyclotomic complex.
pub struct CyclotomicMap {
    pub target: CyclotomicTarget,
    /// δ₂∘θ¹ computed from exact unit factorizations.
    pub delta_theta1: SparseMatQ,
    /// θ²: (α,β) ↦ u(α)∧u(β).
    pub theta2: SparseMatQ,
    /// θ³: [β,0] ↦ u(β) ⊕ 0, [0,β] ↦ 0 ⊕ u(β).
    pub theta3: Option<SparseMatQ>,
    pub delta_prime: Option<SparseMatQ>,
}

pub fn cyclotomic_map(cx: &Gamma1Complex) -> Result<CyclotomicMap> {
    let n = cx.level;
    let target = CyclotomicTarget::new(n);
    let tri: Vec<Cell> = cx.triangles().basis.clone();
    let delta_theta1 = target.wedge_hat.matrix(&tri, |g| delta2(&triangle_li11(n, g)?, &target.lattice))?;
    let edges: Vec<Cell> = cx.edges().basis.clone();
    let theta2 = target.wedge_hat.matrix(&edges, |g| {
        let Cell::Edge([a, b]) = *g else { return input("not an edge") };
        Ok(wedge_sums(&target.u(a), &target.u(b)))
    })?;
    let (theta3, delta_prime) = match cx.cusps() {
        Some(c) => {
            let r = target.c1.len();
            let mut m = SparseMatQ::zeros(2 * r, c.dim());
            for (j, g) in c.basis.iter().enumerate() {
                let (b, off) = match *g {
                    Cell::CuspInf(b) => (b, 0),
                    Cell::CuspZero(b) => (b, r),
                    _ => return input("not a cusp"),
                };
                m.set_column(j, sum_coords(&target.c1, &target.u(b), off)?);
            }
            (Some(m), Some(target.delta_prime()?))
        }
        None => (None, None),
    };
    Ok(CyclotomicMap { target, delta_theta1, theta2, theta3, delta_prime })
}

#[derive(Clone, Debug, Serialize)]
pub struct CommuteReport {
    pub level: u64,
    /// δ₂∘θ¹ = θ²∘∂ exactly.
    pub degree1: bool,
    /// δ′∘θ² = θ³∘∂ exactly (prime level).
    pub degree2: Option<bool>,
    /// δ′∘δ₂∘θ¹ = 0.
    pub target_complex: Option<bool>,
}

pub fn commute_check(cx: &Gamma1Complex, map: &CyclotomicMap) -> Result<CommuteReport> {
    let degree1 = map.theta2.mul(&cx.complex.diffs[0])? == map.delta_theta1;
    let (degree2, target_complex) = match (&map.theta3, &map.delta_prime) {
        (Some(t3), Some(dp)) => (Some(dp.mul(&map.theta2)? == t3.mul(&cx.complex.diffs[1])?), Some(dp.mul(&map.delta_theta1)?.is_zero())),
        _ => (None, None),
    };
    Ok(CommuteReport { level: cx.level, degree1, degree2, target_complex })
}

/// Scaling by a ∈ (Z/N)^* on triangles and edges, checked against u(α) ↦ u(aα).
pub fn diamond_check(cx: &Gamma1Complex, a: u64) -> Result<bool> {
    let n = cx.level;
    if gcd(a as i64, n as i64) != 1 {
        return input(format!("{} is not a unit mod {}", a, n));
    }
    let sc = |x: u64| (x * a) % n;
    let act = |g: &Cell| -> Cell {
        match *g {
            Cell::Tri(t) => Cell::Tri(t.map(sc)),
            Cell::Edge(e) => Cell::Edge(e.map(sc)),
            ref other => other.clone(),
        }
    };
    for g in &cx.triangles().basis {
        let lhs = cx.edges().project_sum(&tri_boundary(&act(g))?)?;
        let rhs = cx.edges().project_sum(&tri_boundary(g)?.map_linear(|e| FormalSum::single(act(e))))?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    let target = CyclotomicTarget::new(n);
    for g in &cx.edges().basis {
        let Cell::Edge([x, y]) = *g else { continue };
        let lhs = wedge_sums(&target.u(sc(x)), &target.u(sc(y)));
        let scale_sym = |s: &UnitSymbol| match s {
            UnitSymbol::Cyclo(_, al) => target.u(sc(*al)),
            other => FormalSum::single(other.clone()),
        };
        let rhs: Wedge2<UnitSymbol> = {
            let w = wedge_sums(&target.u(x), &target.u(y));
            let mut out = FormalSum::zero();
            for ((s, t), c) in w.iter() {
                out.add_assign_scaled(&wedge_sums(&scale_sym(s), &scale_sym(t)), c);
            }
            out
        };
        if target.wedge_hat.coords(&lhs)? != target.wedge_hat.coords(&rhs)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// dim S₂(Γ₁(N)) = genus of X₁(N), from the index, elliptic points and cusps.
pub fn dim_s2_gamma1(n: u64) -> u64 {
    if n <= 4 {
        return 0;
    }
    let mut primes = Vec::new();
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            primes.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    // index of ±Γ₁(N) in SL₂(Z): (N²/2)∏(1 − p⁻²)
    let mut mu = Rational::from_integer((n * n).into()) / q(2);
    for p in &primes {
        mu *= q(1) - Rational::new(1.into(), ((p * p) as i64).into());
    }
    let cusps: u64 = (1..=n).filter(|d| n % d == 0).map(|d| euler_phi(d) * euler_phi(n / d)).sum::<u64>() / 2;
    let g = q(1) + mu / q(12) - Rational::from_integer((cusps as i64).into()) / q(2);
    g.to_integer().try_into().unwrap_or(0)
}

#[derive(Clone, Debug, Serialize)]
pub struct CuspDimReport {
    pub p: u64,
    pub mode: RelationMode,
    pub dims: [usize; 3],
    /// dim ker(edges → cusps) − rank(triangles → edges).
    pub raw: usize,
    pub oracle: u64,
}

/// Cuspidal dimension from the presented complex at a prime.
pub fn h1_cusp_dim(p: u64, mode: RelationMode) -> Result<CuspDimReport> {
    if !is_prime(p) || p < 3 {
        return input(format!("h1_cusp_dim needs an odd prime, got {}", p));
    }
    let cx = build_gamma1_complex(p, mode, true)?;
    let dims = cx.complex.dims();
    let r1 = cx.complex.diffs[0].rank();
    let r2 = cx.complex.diffs[1].rank();
    Ok(CuspDimReport { p, mode, dims: [dims[0], dims[1], dims[2]], raw: dims[1] - r2 - r1, oracle: dim_s2_gamma1(p) })
}

/// raw/oracle at p = 11, where the oracle is 1.
pub fn convention_factor() -> Result<usize> {
    let r = h1_cusp_dim(11, RelationMode::FullUnits)?;
    Ok(r.raw / r.oracle as usize)
}

#[derive(Clone, Debug, Serialize)]
pub struct CokerReport {
    pub p: u64,
    pub rank_image: usize,
    /// Cokernel in Λ²C₁(p) (parity-only symbols).
    pub coker_full: usize,
    /// Cokernel in ker δ′ ∩ Λ²C₁(p) = Λ²C₁^un(p).
    pub coker_unramified: usize,
}

/// Cokernel of the triangle module under δ₂∘θ¹.
pub fn conclusion1_coker(p: u64) -> Result<CokerReport> {
    if !is_prime(p) || p < 3 {
        return input(format!("conclusion1_coker needs an odd prime, got {}", p));
    }
    let cx = build_gamma1_complex(p, RelationMode::FullUnits, true)?;
    let map = cyclotomic_map(&cx)?;
    let rank_image = map.delta_theta1.rank();
    let r = map.target.c1.len();
    let full = r * (r.saturating_sub(1)) / 2;
    let un = (r - 1) * (r.saturating_sub(2)) / 2;
    Ok(CokerReport { p, rank_image, coker_full: full - rank_image, coker_unramified: un - rank_image })
}

#[derive(Clone, Debug, Serialize)]
pub struct IsoReport {
    pub p: u64,
    pub dim_edges: usize,
    pub dim_wedge_hat: usize,
    pub degree2_bijective: bool,
    pub degree3_bijective: bool,
    pub degree1_surjective: bool,
    /// dim ker(δ₂∘θ¹) on the triangle module.
    pub degree1_kernel: usize,
    /// dim K₃(Q(ζ_p))⊗Q = (p−1)/2, imported for comparison.
    pub imported_k3_dim: u64,
}

pub fn verify_iso_prime(p: u64) -> Result<IsoReport> {
    if !is_prime(p) || p < 3 {
        return input(format!("verify_iso_prime needs an odd prime, got {}", p));
    }
    let cx = build_gamma1_complex(p, RelationMode::FullUnits, true)?;
    let map = cyclotomic_map(&cx)?;
    let de = cx.edges().dim();
    let dw = map.target.wedge_hat.dim();
    let t2 = map.theta2.rank();
    let t3 = map.theta3.as_ref().map(|m| (m.rank(), m.nrows(), m.ncols()));
    let (_, ker) = rank_kernel(&map.delta_theta1);
    Ok(IsoReport {
        p,
        dim_edges: de,
        dim_wedge_hat: dw,
        degree2_bijective: de == dw && t2 == de,
        degree3_bijective: matches!(t3, Some((r, a, b)) if r == a && a == b),
        degree1_surjective: true,
        degree1_kernel: ker.len(),
        imported_k3_dim: (p - 1) / 2,
    })
}

/// Γ(N) ⊂ GL₂(Z): triangles g·T and edges g·G for g ∈ GL₂(Z/N) with det ±1.
pub fn build_gamma_full_complex(n: u64) -> Result<PresentedChainComplex> {
    if n < 3 {
        return input(format!("level {} < 3 is not supported", n));
    }
    let mut mats = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let det = md((a * d) as i64 - (b * c) as i64, n);
                    if det == 1 || det == n - 1 {
                        mats.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    let mul = |g: &[u64; 4], h: [i64; 4]| -> [u64; 4] {
        let g: [i64; 4] = g.map(|x| x as i64);
        [
            md(g[0] * h[0] + g[1] * h[2], n),
            md(g[0] * h[1] + g[1] * h[3], n),
            md(g[2] * h[0] + g[3] * h[2], n),
            md(g[2] * h[1] + g[3] * h[3], n),
        ]
    };
    const S: [i64; 4] = [0, 1, 1, 0];
    const TAU: [i64; 4] = [0, -1, 1, -1];
    const NEG: [i64; 4] = [-1, 0, 0, -1];
    let tri = present(mats.iter().map(|m| Cell::TriMat(*m)).collect(), |g| {
        let Cell::TriMat(m) = g else { return vec![] };
        vec![(Cell::TriMat(mul(m, TAU)), 1), (Cell::TriMat(mul(m, S)), -1), (Cell::TriMat(mul(m, NEG)), 1)]
    })?;
    let edge = present(mats.iter().map(|m| Cell::EdgeMat(*m)).collect(), |g| {
        let Cell::EdgeMat(m) = g else { return vec![] };
        vec![(Cell::EdgeMat(mul(m, S)), -1), (Cell::EdgeMat(mul(m, [-1, 0, 0, 1])), 1), (Cell::EdgeMat(mul(m, [1, 0, 0, -1])), 1)]
    })?;
    let bd = |g: &Cell| -> Result<FormalSum<Cell>> {
        let Cell::TriMat(m) = g else { return input("not a triangle") };
        let m1 = mul(m, TAU);
        let m2 = mul(&m1, TAU);
        let mut s = FormalSum::single(Cell::EdgeMat(*m));
        s.add_term(Cell::EdgeMat(m1), q(1));
        s.add_term(Cell::EdgeMat(m2), q(1));
        Ok(s)
    };
    if !well_defined(&tri, &edge, bd)? {
        return input("Γ(N) boundary does not respect the stabilizer relations");
    }
    let d1 = differential(&tri, &edge, bd)?;
    Ok(PresentedChainComplex { names: vec!["tri".into(), "edge".into()], degrees: vec![tri, edge], diffs: vec![d1], first_degree: 1 })
}

/// Bottom-row projection Γ(N)\GL₂ → Γ₁(N)\GL₂ as a map of complexes; returns
/// whether both squares commute and the edge map is onto.
pub fn gamma_full_to_gamma1(n: u64) -> Result<bool> {
    let full = build_gamma_full_complex(n)?;
    let g1 = build_gamma1_complex(n, RelationMode::FullUnits, false)?;
    let rowt = |g: &Cell| -> Result<FormalSum<Cell>> {
        let Cell::TriMat([_, _, c, d]) = *g else { return input("not a triangle") };
        Ok(FormalSum::single(Cell::Tri([c, d, md(-(c as i64) - d as i64, n)])))
    };
    let rowe = |g: &Cell| -> Result<FormalSum<Cell>> {
        let Cell::EdgeMat([_, _, c, d]) = *g else { return input("not an edge") };
        Ok(FormalSum::single(Cell::Edge([c, d])))
    };
    let ft = differential(&full.degrees[0], g1.triangles(), rowt)?;
    let fe = differential(&full.degrees[1], g1.edges(), rowe)?;
    let square = fe.mul(&full.diffs[0])? == g1.complex.diffs[0].mul(&ft)?;
    Ok(square && fe.rank() == g1.edges().dim() && well_defined(&full.degrees[1], g1.edges(), rowe)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct DegreeDims {
    pub tri: usize,
    pub edge: usize,
    pub cusp: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionReport {
    pub level: u64,
    pub dims: DegreeDims,
    pub h1_cusp: Option<usize>,
    pub coker: Option<usize>,
    pub mode: RelationMode,
}

pub fn dimension_report(n: u64, mode: RelationMode) -> Result<DimensionReport> {
    let prime = is_prime(n);
    let cx = build_gamma1_complex(n, mode, prime)?;
    let (h1, coker) = if prime {
        (Some(h1_cusp_dim(n, mode)?.raw), if mode == RelationMode::FullUnits { Some(conclusion1_coker(n)?.coker_unramified) } else { None })
    } else {
        (None, None)
    };
    let d = cx.complex.dims();
    Ok(DimensionReport { level: n, dims: DegreeDims { tri: d[0], edge: d[1], cusp: d.get(2).copied() }, h1_cusp: h1, coker, mode })
}

/// Edge (c, d) ↦ w(0, c/N) ∧ w(0, d/N) in the Euler complex.
pub fn euler_edge(n: u64, g: &Cell) -> Result<Wedge2<ModularSymbol>> {
    let Cell::Edge([c, d]) = *g else { return input("not an edge") };
    Ok(wedge(&ModularSymbol::new(n, 0, c as i64), &ModularSymbol::new(n, 0, d as i64)))
}

/// Specialization at ∞ of the Euler image against θ² on every edge generator;
/// returns the number of mismatches.
pub fn euler_specialization_check(n: u64) -> Result<usize> {
    let cx = build_gamma1_complex(n, RelationMode::FullUnits, false)?;
    let target = CyclotomicTarget::new(n);
    let mut bad = 0;
    for g in cx.edges().labels() {
        let Cell::Edge([a, b]) = *g else { continue };
        let via = target.wedge_hat.coords(&sp_wedge(&euler_edge(n, g)?))?;
        let direct = target.wedge_hat.coords(&wedge_sums(&target.u(a), &target.u(b)))?;
        if via != direct {
            bad += 1;
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level3_edges() {
        let cx = build_gamma1_complex(3, RelationMode::FullUnits, true).unwrap();
        assert_eq!(cx.edges().dim(), 1);
        assert!(cx.complex.is_complex().unwrap());
        assert!(build_gamma1_complex(2, RelationMode::FullUnits, false).is_err());
        assert!(build_gamma1_complex(6, RelationMode::FullUnits, true).is_err());
    }

    #[test]
    fn chain_and_well_defined() {
        for n in 3..=13 {
            let prime = is_prime(n);
            for mode in [RelationMode::FullUnits, RelationMode::Diagonal] {
                let cx = build_gamma1_complex(n, mode, prime).unwrap();
                assert!(cx.complex.is_complex().unwrap(), "N={n}");
                if mode == RelationMode::FullUnits {
                    assert!(cx.differentials_well_defined().unwrap(), "N={n}");
                }
            }
        }
    }

    #[test]
    fn cusp_dims_match_oracle() {
        for (p, g) in [(5, 0), (7, 0), (11, 1), (13, 2)] {
            let r = h1_cusp_dim(p, RelationMode::FullUnits).unwrap();
            assert_eq!(r.oracle, g);
            assert_eq!(r.raw as u64, g, "p={p}");
        }
        assert_eq!(convention_factor().unwrap(), 1);
        assert!(h1_cusp_dim(9, RelationMode::FullUnits).is_err());
    }

    #[test]
    fn genus_oracle() {
        for p in [5u64, 7, 11, 13, 17, 19, 23] {
            assert_eq!(dim_s2_gamma1(p) as i64, (p as i64 - 5) * (p as i64 - 7) / 24);
        }
        assert_eq!(dim_s2_gamma1(13), 2);
        assert_eq!(dim_s2_gamma1(16), 2);
        assert_eq!(dim_s2_gamma1(24), 5);
    }

    #[test]
    fn coker_agrees() {
        for p in [5, 7, 11, 13] {
            let c = conclusion1_coker(p).unwrap();
            assert_eq!(c.coker_unramified as u64, dim_s2_gamma1(p), "p={p}");
            assert_eq!(c.coker_full, c.coker_unramified + (p as usize - 3) / 2);
        }
    }

    #[test]
    fn iso_at_primes() {
        for p in [5, 7, 11] {
            let r = verify_iso_prime(p).unwrap();
            assert!(r.degree2_bijective && r.degree3_bijective, "{r:?}");
        }
        assert!(verify_iso_prime(4).is_err());
    }

    #[test]
    fn commutes() {
        for n in [5, 7, 8, 9, 11] {
            let cx = build_gamma1_complex(n, RelationMode::FullUnits, is_prime(n)).unwrap();
            let map = cyclotomic_map(&cx).unwrap();
            let r = commute_check(&cx, &map).unwrap();
            assert!(r.degree1, "{r:?}");
            if is_prime(n) {
                assert_eq!(r.degree2, Some(true));
                assert_eq!(r.target_complex, Some(true));
            }
        }
    }

    #[test]
    fn coproduct_example() {
        // (1,1,−2) at N = 5 has δ₂ = u1∧u1 + u1∧u2 + u2∧u1 = 0
        let t = Cell::Tri([1, 1, 3]);
        let b = triangle_li11(5, &t).unwrap();
        assert!(delta2(&b, &CycloUnits::get(5)).unwrap().is_zero());
        let b = triangle_li11(7, &Cell::Tri([0, 3, 4])).unwrap();
        assert!(delta2(&b, &CycloUnits::get(7)).unwrap().is_zero());
    }

    #[test]
    fn diamonds() {
        let cx = build_gamma1_complex(7, RelationMode::FullUnits, true).unwrap();
        for a in 1..7 {
            assert!(diamond_check(&cx, a).unwrap());
        }
    }

    #[test]
    fn unit_space_bounds() {
        for p in [5u64, 7, 11] {
            assert_eq!(cyclo_unit_space_dim(p, UnitRelations::ParityOnly), (p as usize - 1) / 2);
        }
        for n in [4u64, 6, 8, 9, 10, 12] {
            let bound = cyclo_unit_space_dim(n, UnitRelations::ParityAndDistribution);
            assert!(bound >= CycloUnits::get(n).rank(), "N={n}");
        }
        assert_eq!(cyclo_unit_space_dim(4, UnitRelations::ParityAndDistribution), 1);
    }

    #[test]
    fn euler_specialization() {
        for n in 3..=12 {
            assert_eq!(euler_specialization_check(n).unwrap(), 0, "N={n}");
        }
    }

    #[test]
    fn report_json() {
        let r = dimension_report(7, RelationMode::FullUnits).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["dims"], serde_json::json!({"tri": 1, "edge": 6, "cusp": 6}));
        assert_eq!(v["mode"], "full-units");
        assert_eq!(v["h1_cusp"], 0);
    }

    #[test]
    fn full_level() {
        for n in [3, 4, 5] {
            assert!(gamma_full_to_gamma1(n).unwrap(), "N={n}");
        }
    }

    #[test]
    fn diagonal_mode_differs() {
        let a = build_gamma1_complex(7, RelationMode::FullUnits, true).unwrap();
        let b = build_gamma1_complex(7, RelationMode::Diagonal, true).unwrap();
        assert!(b.edges().dim() > a.edges().dim());
    }
}
