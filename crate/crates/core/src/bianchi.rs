//! Bianchi tessellations for d = 1, 3, coinvariant complexes of Γ₁(N) ⊂ GL₂(O_K),
//! their θ-maps onto elliptic-unit complexes, polyhedron volumes and α(K_P).

use std::collections::BTreeMap;

use num_complex::Complex64 as C;
use num_traits::Zero;
use serde::Serialize;

use crate::bloch::{bw_dilog, cross_ratio, NumBlochElem, P1, TAU_DEDUP};
use crate::complex::{differential, perm3_sign, present, sum_coords, well_defined, Cell, PresentedChainComplex, WedgeSpace, PERMS3};
use crate::error::{input, Error, Result};
use crate::hmap::{theta_triple, Average, EllCurveC, TorsionPt};
use crate::modular_gl2z::{edge_boundary, tri_boundary, RelationMode};
use crate::numberfields::{gcd, is_prime, ImagQuadInt, PrimeIdeal};
use crate::qlinalg::{q, qf, rank_kernel, FormalSum, Presentation, Rational, SparseMatQ};
use crate::qseries::CheckStatus;
use crate::units::{wedge, wedge_sums, UnitSymbol, Wedge2};

/// (a, b, c, d) for the matrix [[a, b], [c, d]].
pub type Mat = [ImagQuadInt; 4];

fn qi(d: u8, a: i64, b: i64) -> ImagQuadInt {
    ImagQuadInt::new(d, a, b)
}

fn det(m: &Mat) -> ImagQuadInt {
    m[0].mul(&m[3]).sub(&m[1].mul(&m[2]))
}

fn check_field(d: u8) -> Result<()> {
    if d == 1 || d == 3 {
        Ok(())
    } else {
        input(format!("no tessellation data for d={}", d))
    }
}

/// A cusp (p : q) in P¹(K).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cusp {
    pub p: ImagQuadInt,
    pub q: ImagQuadInt,
}

impl Cusp {
    fn new(p: ImagQuadInt, q: ImagQuadInt) -> Cusp {
        Cusp { p, q }
    }

    fn finite(x: ImagQuadInt) -> Cusp {
        Cusp { p: x, q: qi(x.d, 1, 0) }
    }

    fn infinity(d: u8) -> Cusp {
        Cusp { p: qi(d, 1, 0), q: qi(d, 0, 0) }
    }

    pub fn same(&self, o: &Cusp) -> bool {
        self.p.mul(&o.q) == o.p.mul(&self.q)
    }

    pub fn act(m: &Mat, c: &Cusp) -> Cusp {
        Cusp { p: m[0].mul(&c.p).add(&m[1].mul(&c.q)), q: m[2].mul(&c.p).add(&m[3].mul(&c.q)) }
    }

    pub fn is_infinite(&self) -> bool {
        self.q.is_zero()
    }

    pub fn to_p1(&self) -> P1 {
        if self.q.is_zero() {
            P1::Inf
        } else {
            P1::Fin(self.p.to_complex() / self.q.to_complex())
        }
    }

    pub fn label(&self) -> String {
        if self.q.is_zero() {
            return "∞".into();
        }
        match self.p.div_exact(&self.q) {
            Some(x) => x.to_string(),
            None => {
                // normalize the denominator to a positive integer when possible
                let n = self.q.norm();
                let num = self.p.mul(&self.q.conj());
                let g = gcd(gcd(num.a, num.b), n);
                format!("({})/{}", qi(num.d, num.a / g, num.b / g), n / g)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Face {
    pub cusps: [String; 3],
    #[serde(skip)]
    pub points: [Cusp; 3],
    #[serde(rename = "matrix")]
    pub matrix_labels: [String; 4],
    #[serde(skip)]
    pub matrix: Mat,
    /// Face = sign · matrix·T as oriented 2-cells.
    pub sign: i8,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizerOrders {
    pub d0: usize,
    pub d1: usize,
    pub d2: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TessellationData {
    pub d: u8,
    pub vertices: Vec<String>,
    #[serde(skip)]
    pub vertex_points: Vec<Cusp>,
    pub faces: Vec<Face>,
    pub stabilizer_orders: StabilizerOrders,
    /// Matrices in the search range preserving B_d.
    #[serde(skip)]
    pub d0: Vec<Mat>,
    pub boundary_cycle: bool,
}

/// Vertices and oriented faces of B_d; the face (0, 1, ∞) comes first, oriented as T.
fn polyhedron_faces(d: u8) -> (Vec<Cusp>, Vec<[usize; 3]>) {
    let z = |a, b| Cusp::finite(qi(d, a, b));
    if d == 3 {
        // 0, 1, ∞, ρ
        let v = vec![z(0, 0), z(1, 0), Cusp::infinity(3), z(0, 1)];
        (v, vec![[0, 1, 2], [2, 1, 3], [0, 2, 3], [1, 0, 3]])
    } else {
        // square 0, 1, 1+i, i; top ∞; bottom (1+i)/2
        let v = vec![z(0, 0), z(1, 0), z(1, 1), z(0, 1), Cusp::infinity(1), Cusp::new(qi(1, 1, 1), qi(1, 2, 0))];
        let mut f = Vec::new();
        for k in 0..4 {
            f.push([k, (k + 1) % 4, 4]);
        }
        for k in 0..4 {
            f.push([(k + 1) % 4, k, 5]);
        }
        (v, f)
    }
}

fn small_elements(d: u8) -> Vec<ImagQuadInt> {
    let mut v = Vec::new();
    for a in -2..=2 {
        for b in -2..=2 {
            let x = qi(d, a, b);
            if x.norm() <= 4 {
                v.push(x);
            }
        }
    }
    v
}

fn t_vertices(d: u8) -> [Cusp; 3] {
    [Cusp::finite(qi(d, 0, 0)), Cusp::finite(qi(d, 1, 0)), Cusp::infinity(d)]
}

fn position(set: &[Cusp], c: &Cusp) -> Option<usize> {
    set.iter().position(|x| x.same(c))
}

fn mat_key(m: &Mat, sign: i8) -> (bool, i64, bool, [i64; 8]) {
    let norms = m.iter().map(|x| x.norm()).sum();
    let lex = [m[0].a, m[0].b, m[1].a, m[1].b, m[2].a, m[2].b, m[3].a, m[3].b].map(|x| -x);
    (sign != 1, norms, det(m) != qi(m[0].d, 1, 0), lex)
}

/// Sum of the oriented edges of sign·m·T over the faces is zero, exactly.
fn is_boundary_cycle(d: u8, faces: &[(Mat, i8)]) -> bool {
    let t = t_vertices(d);
    let mut edges: Vec<(Cusp, Cusp, i64)> = Vec::new();
    for (m, s) in faces {
        let img: Vec<Cusp> = t.iter().map(|c| Cusp::act(m, c)).collect();
        for k in 0..3 {
            let (a, b) = (img[k], img[(k + 1) % 3]);
            if let Some(e) = edges.iter_mut().find(|e| e.0.same(&a) && e.1.same(&b)) {
                e.2 += *s as i64;
            } else if let Some(e) = edges.iter_mut().find(|e| e.0.same(&b) && e.1.same(&a)) {
                e.2 -= *s as i64;
            } else {
                edges.push((a, b, *s as i64));
            }
        }
    }
    edges.iter().all(|e| e.2 == 0)
}

/// Face matrices by search over entries of norm ≤ 4 with unit determinant.
pub fn tessellation_data(d: u8) -> Result<TessellationData> {
    check_field(d)?;
    let (verts, faces) = polyhedron_faces(d);
    let elems = small_elements(d);
    let t = t_vertices(d);
    let mut best: Vec<Option<(Mat, i8)>> = vec![None; faces.len()];
    let (mut n0, mut n1, mut n2) = (Vec::new(), 0usize, 0usize);
    for &a in &elems {
        for &b in &elems {
            for &c in &elems {
                for &e in &elems {
                    let m = [a, b, c, e];
                    if !det(&m).is_unit() {
                        continue;
                    }
                    let img: Vec<Cusp> = t.iter().map(|x| Cusp::act(&m, x)).collect();
                    if let (Some(i0), Some(i1), Some(i2)) = (position(&t, &img[0]), position(&t, &img[1]), position(&t, &img[2])) {
                        if i0 != i1 && i1 != i2 && i0 != i2 {
                            n1 += 1;
                        }
                    }
                    let g = [t[0], t[2]];
                    if let (Some(i0), Some(i2)) = (position(&g, &img[0]), position(&g, &img[2])) {
                        if i0 != i2 {
                            n2 += 1;
                        }
                    }
                    if verts.iter().all(|v| position(&verts, &Cusp::act(&m, v)).is_some()) {
                        n0.push(m);
                    }
                    let pos: Vec<Option<usize>> = img.iter().map(|x| position(&verts, x)).collect();
                    let Some(pos) = pos.into_iter().collect::<Option<Vec<usize>>>() else { continue };
                    for (fi, f) in faces.iter().enumerate() {
                        let p: Option<Vec<usize>> = pos.iter().map(|v| f.iter().position(|w| w == v)).collect();
                        let Some(p) = p else { continue };
                        if p[0] == p[1] || p[1] == p[2] || p[0] == p[2] {
                            continue;
                        }
                        let sign = perm3_sign([p[0], p[1], p[2]]);
                        let better = match &best[fi] {
                            None => true,
                            Some((m0, s0)) => mat_key(&m, sign) < mat_key(m0, *s0),
                        };
                        if better {
                            best[fi] = Some((m, sign));
                        }
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for (fi, b) in best.into_iter().enumerate() {
        let (m, sign) = b.ok_or_else(|| Error::Input(format!("no face matrix for face {} of B_{}", fi, d)))?;
        let pts = faces[fi].map(|i| verts[i]);
        out.push(Face { cusps: pts.map(|c| c.label()), points: pts, matrix_labels: m.map(|x| x.to_string()), matrix: m, sign });
    }
    let signed: Vec<(Mat, i8)> = out.iter().map(|f| (f.matrix, f.sign)).collect();
    let cycle = is_boundary_cycle(d, &signed);
    if !cycle {
        return input(format!("face matrices of B_{} do not form a cycle", d));
    }
    Ok(TessellationData {
        d,
        vertices: verts.iter().map(|c| c.label()).collect(),
        vertex_points: verts,
        faces: out,
        stabilizer_orders: StabilizerOrders { d0: n0.len(), d1: n1, d2: n2 },
        d0: n0,
        boundary_cycle: cycle,
    })
}

/// The ring O_K/(g), elements encoded as x + e·y for the reduced lift x + y·t.
#[derive(Clone, Debug)]
pub struct ResidueRing {
    pub d: u8,
    pub generator: ImagQuadInt,
    pub norm: u64,
    /// g·O_K has basis (e, 0), (f, h) in coordinates (1, t).
    e: i64,
    f: i64,
    h: i64,
    /// Sorted residues of O_K^*.
    pub mu: Vec<u64>,
    pub prime: bool,
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a.abs(), a.signum(), 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

impl ResidueRing {
    pub fn new(g: ImagQuadInt) -> Result<ResidueRing> {
        check_field(g.d)?;
        if g.is_zero() || g.is_unit() {
            return input(format!("{} does not define a proper quotient", g));
        }
        let d = g.d;
        let gt = g.mul(&qi(d, 0, 1));
        let (h, s, u) = ext_gcd(g.b, gt.b);
        let det = (g.a * gt.b - g.b * gt.a).abs();
        let e = det / h;
        let f = (s * g.a + u * gt.a).rem_euclid(e);
        let prime = PrimeIdeal::from_generator(g).is_ok();
        let mut r = ResidueRing { d, generator: g, norm: det as u64, e, f, h, mu: Vec::new(), prime };
        let mut mu: Vec<u64> = ImagQuadInt::units(d).iter().map(|x| r.reduce(x)).collect();
        mu.sort();
        mu.dedup();
        r.mu = mu;
        Ok(r)
    }

    pub fn from_prime(pr: &PrimeIdeal) -> Result<ResidueRing> {
        ResidueRing::new(pr.generator)
    }

    pub fn reduce(&self, x: &ImagQuadInt) -> u64 {
        let k = x.b.div_euclid(self.h);
        let (xa, xb) = (x.a - k * self.f, x.b - k * self.h);
        (xa.rem_euclid(self.e) + self.e * xb) as u64
    }

    pub fn lift(&self, u: u64) -> ImagQuadInt {
        let u = u as i64;
        qi(self.d, u % self.e, u / self.e)
    }

    pub fn add(&self, x: u64, y: u64) -> u64 {
        self.reduce(&self.lift(x).add(&self.lift(y)))
    }

    pub fn neg(&self, x: u64) -> u64 {
        self.reduce(&self.lift(x).neg())
    }

    pub fn mul(&self, x: u64, y: u64) -> u64 {
        self.reduce(&self.lift(x).mul(&self.lift(y)))
    }

    pub fn one(&self) -> u64 {
        self.reduce(&qi(self.d, 1, 0))
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.norm
    }

    pub fn is_unit(&self, x: u64) -> bool {
        let one = self.one();
        self.elements().any(|y| self.mul(x, y) == one)
    }

    pub fn units(&self) -> Vec<u64> {
        self.elements().filter(|&x| self.is_unit(x)).collect()
    }

    /// Smallest element of x·μ.
    pub fn coset_rep(&self, x: u64) -> u64 {
        self.mu.iter().map(|&u| self.mul(x, u)).min().unwrap()
    }

    /// Representatives of (O_K/N − 0)/μ.
    pub fn coset_reps(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.elements().filter(|&x| x != 0).map(|x| self.coset_rep(x)).collect();
        v.sort();
        v.dedup();
        v
    }

    /// |(O/P)^*/μ| at prime level.
    pub fn qprime(&self) -> u64 {
        (self.norm - 1) / self.mu.len() as u64
    }

    /// (α, β, N) = (1): the lattice spanned by α̃, β̃, g and their t-multiples is Z².
    pub fn primitive(&self, a: u64, b: u64) -> bool {
        if self.prime {
            return a != 0 || b != 0;
        }
        let t = qi(self.d, 0, 1);
        let mut vs = Vec::new();
        for x in [self.lift(a), self.lift(b), self.generator] {
            vs.push(x);
            vs.push(x.mul(&t));
        }
        let mut g = 0;
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                g = gcd(g, vs[i].a * vs[j].b - vs[i].b * vs[j].a);
            }
        }
        g == 1
    }

    pub fn label(&self) -> String {
        format!("({})", self.generator)
    }

    pub fn row_mul(&self, r: [u64; 2], m: &Mat) -> [u64; 2] {
        let m = m.map(|x| self.reduce(&x));
        [self.add(self.mul(r[0], m[0]), self.mul(r[1], m[2])), self.add(self.mul(r[0], m[1]), self.mul(r[1], m[3]))]
    }

    pub fn rows(&self) -> Vec<[u64; 2]> {
        let mut v = Vec::new();
        for a in self.elements() {
            for b in self.elements() {
                if self.primitive(a, b) {
                    v.push([a, b]);
                }
            }
        }
        v
    }
}

#[derive(Clone, Debug)]
pub struct BianchiComplex {
    pub d: u8,
    pub ring: ResidueRing,
    pub mode: RelationMode,
    pub tess: TessellationData,
    /// Degrees poly, tri, edge and (prime level) cusp.
    pub complex: PresentedChainComplex,
}

fn tri_of_row(ring: &ResidueRing, r: [u64; 2]) -> Cell {
    Cell::Tri([r[0], r[1], ring.neg(ring.add(r[0], r[1]))])
}

/// ∂(g·B_d) = Σ s_f (g h_f)·T, where the coset of g·T with row (α, β) carries −(α, β, −α−β).
pub fn poly_boundary(ring: &ResidueRing, tess: &TessellationData, g: &Cell) -> Result<FormalSum<Cell>> {
    let Cell::Poly(r) = *g else { return input("not a polyhedron") };
    let mut s = FormalSum::zero();
    for f in &tess.faces {
        s.add_term(tri_of_row(ring, ring.row_mul(r, &f.matrix)), q(-(f.sign as i64)));
    }
    Ok(s)
}

fn scale_cell(ring: &ResidueRing, a: u64, g: &Cell) -> Cell {
    let sc = |x: u64| ring.mul(x, a);
    match *g {
        Cell::Poly(r) => Cell::Poly(r.map(sc)),
        Cell::Tri(t) => Cell::Tri(t.map(sc)),
        Cell::Edge(e) => Cell::Edge(e.map(sc)),
        Cell::CuspInf(b) => Cell::CuspInf(sc(b)),
        Cell::CuspZero(b) => Cell::CuspZero(sc(b)),
        ref other => other.clone(),
    }
}

impl BianchiComplex {
    pub fn degree(&self, name: &str) -> Option<&Presentation<Cell>> {
        self.complex.degree(name).map(|i| &self.complex.degrees[i])
    }

    pub fn polys(&self) -> &Presentation<Cell> {
        &self.complex.degrees[0]
    }

    pub fn triangles(&self) -> &Presentation<Cell> {
        &self.complex.degrees[1]
    }

    pub fn edges(&self) -> &Presentation<Cell> {
        &self.complex.degrees[2]
    }

    pub fn cusps(&self) -> Option<&Presentation<Cell>> {
        self.complex.degrees.get(3)
    }

    /// (dim M¹, dim M², dim M³).
    pub fn dims(&self) -> (usize, usize, Option<usize>) {
        (self.triangles().dim(), self.edges().dim(), self.cusps().map(|c| c.dim()))
    }

    pub fn differentials_well_defined(&self) -> Result<bool> {
        let mut ok = well_defined(self.polys(), self.triangles(), |g| poly_boundary(&self.ring, &self.tess, g))?;
        ok &= well_defined(self.triangles(), self.edges(), tri_boundary)?;
        if let Some(c) = self.cusps() {
            ok &= well_defined(self.edges(), c, edge_boundary)?;
        }
        Ok(ok)
    }

    /// d∘d = 0 and every differential respects the relations.
    pub fn chain_ok(&self) -> Result<bool> {
        Ok(self.complex.is_complex()? && self.differentials_well_defined()?)
    }

    /// Matrix of the scaling by a on the named degree.
    pub fn scaling_matrix(&self, k: usize, a: u64) -> Result<SparseMatQ> {
        let p = &self.complex.degrees[k];
        differential(p, p, |g| Ok(FormalSum::single(scale_cell(&self.ring, a, g))))
    }
}

pub fn build_bianchi_complex(d: u8, g: ImagQuadInt, mode: RelationMode, with_cusps: bool) -> Result<BianchiComplex> {
    let ring = ResidueRing::new(g)?;
    if ring.d != d {
        return input("generator lies in a different field");
    }
    if with_cusps && !ring.prime {
        return input(format!("cusp degree is only attached at prime level, not {}", ring.label()));
    }
    let tess = tessellation_data(d)?;
    let rows = ring.rows();
    let mu = ring.mu.clone();

    let poly = present(rows.iter().map(|r| Cell::Poly(*r)).collect(), |c| {
        let Cell::Poly(r) = *c else { return vec![] };
        tess.d0.iter().map(|m| (Cell::Poly(ring.row_mul(r, m)), 1)).collect()
    })?;
    let tri = present(rows.iter().map(|r| tri_of_row(&ring, *r)).collect(), |c| {
        let Cell::Tri(t) = *c else { return vec![] };
        let mut out: Vec<(Cell, i8)> = PERMS3.iter().map(|p| (Cell::Tri([t[p[0]], t[p[1]], t[p[2]]]), perm3_sign(*p))).collect();
        for &u in &mu {
            out.push((Cell::Tri(t.map(|x| ring.mul(x, u))), 1));
        }
        out
    })?;
    let edge = present(rows.iter().map(|r| Cell::Edge(*r)).collect(), |c| {
        let Cell::Edge([x, y]) = *c else { return vec![] };
        let mut out = vec![(Cell::Edge([y, x]), -1)];
        for &u in &mu {
            match mode {
                RelationMode::Diagonal => out.push((Cell::Edge([ring.mul(x, u), ring.mul(y, u)]), 1)),
                RelationMode::FullUnits => {
                    for &w in &mu {
                        out.push((Cell::Edge([ring.mul(x, u), ring.mul(y, w)]), 1));
                    }
                }
            }
        }
        out
    })?;
    let d0 = differential(&poly, &tri, |c| poly_boundary(&ring, &tess, c))?;
    let d1 = differential(&tri, &edge, tri_boundary)?;
    let mut names = vec!["poly".to_string(), "tri".to_string(), "edge".to_string()];
    let mut diffs = vec![d0, d1];
    let mut degrees = vec![poly, tri, edge];
    if with_cusps {
        let gens: Vec<Cell> = ring.elements().filter(|&b| b != 0).flat_map(|b| [Cell::CuspInf(b), Cell::CuspZero(b)]).collect();
        let cusp = present(gens, |c| match *c {
            Cell::CuspInf(b) => mu.iter().map(|&u| (Cell::CuspInf(ring.mul(b, u)), 1)).collect(),
            Cell::CuspZero(b) => mu.iter().map(|&u| (Cell::CuspZero(ring.mul(b, u)), 1)).collect(),
            _ => vec![],
        })?;
        diffs.push(differential(&degrees[2], &cusp, edge_boundary)?);
        degrees.push(cusp);
        names.push("cusp".into());
    }
    Ok(BianchiComplex { d, ring, mode, tess, complex: PresentedChainComplex { names, degrees, diffs, first_degree: 0 } })
}

/// Full-units complex with cusps at a prime ideal.
pub fn build_prime(pr: &PrimeIdeal) -> Result<BianchiComplex> {
    build_bianchi_complex(pr.d, pr.generator, RelationMode::FullUnits, true)
}

/// Ĉ₁(P) on the independent symbols e(β), β ∈ F_P^*/μ, plus the formal zero.
pub struct EllipticTarget {
    pub ring: ResidueRing,
    pub c1: Vec<UnitSymbol>,
    pub wedge_hat: WedgeSpace<UnitSymbol>,
}

impl EllipticTarget {
    pub fn new(ring: &ResidueRing) -> EllipticTarget {
        let c1: Vec<UnitSymbol> = ring.coset_reps().into_iter().map(UnitSymbol::Elliptic).collect();
        let mut hat = c1.clone();
        hat.push(UnitSymbol::Zero);
        EllipticTarget { ring: ring.clone(), c1, wedge_hat: WedgeSpace::new(hat) }
    }

    pub fn e(&self, x: u64) -> UnitSymbol {
        if x == 0 {
            UnitSymbol::Zero
        } else {
            UnitSymbol::Elliptic(self.ring.coset_rep(x))
        }
    }

    /// δ₂θ(α, β, γ) = e(α)∧e(β) + e(β)∧e(γ) + e(γ)∧e(α).
    pub fn delta2_triple(&self, t: [u64; 3]) -> Wedge2<UnitSymbol> {
        let mut w = FormalSum::zero();
        for k in 0..3 {
            w.add_assign_scaled(&wedge(&self.e(t[k]), &self.e(t[(k + 1) % 3])), &q(1));
        }
        w
    }

    /// δ′: e(a)∧e(b) ↦ 0 ⊕ (e(a) − e(b)), θ₀∧e(b) ↦ −e(b) ⊕ e(b).
    pub fn delta_prime(&self) -> Result<SparseMatQ> {
        let r = self.c1.len();
        let mut m = SparseMatQ::zeros(2 * r, self.wedge_hat.dim());
        for (j, (a, b)) in self.wedge_hat.pairs.iter().enumerate() {
            let pos = |s: &UnitSymbol| self.c1.iter().position(|x| x == s);
            match (pos(a), pos(b)) {
                (Some(i), Some(k)) => {
                    m.add_to(r + i, j, &q(1));
                    m.add_to(r + k, j, &q(-1));
                }
                (Some(i), None) => {
                    m.add_to(i, j, &q(1));
                    m.add_to(r + i, j, &q(-1));
                }
                _ => return input("unexpected wedge pair"),
            }
        }
        Ok(m)
    }

    pub fn sigma(&self) -> SparseMatQ {
        let r = self.c1.len();
        let mut m = SparseMatQ::zeros(1, 2 * r);
        for j in 0..2 * r {
            m.set(0, j, q(1));
        }
        m
    }

    /// Columns spanning Λ²C₁^un, the wedges of degree-zero combinations.
    pub fn wedge_unramified(&self) -> Result<SparseMatQ> {
        let v: Vec<FormalSum<UnitSymbol>> = self.c1[1..]
            .iter()
            .map(|s| {
                let mut x = FormalSum::single(s.clone());
                x.add_term(self.c1[0].clone(), q(-1));
                x
            })
            .collect();
        let mut pairs = Vec::new();
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                pairs.push((i, j));
            }
        }
        self.wedge_hat.matrix(&pairs, |&(i, j)| Ok(wedge_sums(&v[i], &v[j])))
    }
}

pub struct EllipticMap {
    pub target: EllipticTarget,
    pub delta_theta1: SparseMatQ,
    pub theta2: SparseMatQ,
    pub theta3: SparseMatQ,
    pub delta_prime: SparseMatQ,
}

/// θ-maps on the formal model: θ¹ is the identity on triangles, θ²(α,β) = e(α)∧e(β),
/// θ³[β,0] = e(β) ⊕ 0, θ³[0,β] = 0 ⊕ e(β).
pub fn theta_maps(cx: &BianchiComplex) -> Result<EllipticMap> {
    let Some(cusps) = cx.cusps() else { return input("θ-maps need the cusp degree (prime level)") };
    let target = EllipticTarget::new(&cx.ring);
    let tri = cx.triangles().basis.clone();
    let delta_theta1 = target.wedge_hat.matrix(&tri, |g| {
        let Cell::Tri(t) = *g else { return input("not a triangle") };
        Ok(target.delta2_triple(t))
    })?;
    let theta2 = target.wedge_hat.matrix(&cx.edges().basis, |g| {
        let Cell::Edge([a, b]) = *g else { return input("not an edge") };
        Ok(wedge(&target.e(a), &target.e(b)))
    })?;
    let r = target.c1.len();
    let mut theta3 = SparseMatQ::zeros(2 * r, cusps.dim());
    for (j, g) in cusps.basis.iter().enumerate() {
        let (b, off) = match *g {
            Cell::CuspInf(b) => (b, 0),
            Cell::CuspZero(b) => (b, r),
            _ => return input("not a cusp"),
        };
        theta3.set_column(j, sum_coords(&target.c1, &FormalSum::single(target.e(b)), off)?);
    }
    let delta_prime = target.delta_prime()?;
    Ok(EllipticMap { target, delta_theta1, theta2, theta3, delta_prime })
}

#[derive(Clone, Debug, Serialize)]
pub struct BianchiCommute {
    pub degree1: bool,
    pub degree2: bool,
    pub target_complex: bool,
    pub sigma_delta_prime: bool,
    pub theta2_bijective: bool,
    pub theta3_bijective: bool,
}

impl BianchiCommute {
    pub fn all(&self) -> bool {
        self.degree1 && self.degree2 && self.target_complex && self.sigma_delta_prime && self.theta2_bijective && self.theta3_bijective
    }
}

fn bijective(m: &SparseMatQ) -> bool {
    m.nrows() == m.ncols() && m.rank() == m.nrows()
}

pub fn commute_check(cx: &BianchiComplex, map: &EllipticMap) -> Result<BianchiCommute> {
    let d1 = &cx.complex.diffs[1];
    let d2 = &cx.complex.diffs[2];
    Ok(BianchiCommute {
        degree1: map.theta2.mul(d1)? == map.delta_theta1,
        degree2: map.delta_prime.mul(&map.theta2)? == map.theta3.mul(d2)?,
        target_complex: map.delta_prime.mul(&map.delta_theta1)?.is_zero(),
        sigma_delta_prime: map.target.sigma().mul(&map.delta_prime)?.is_zero(),
        theta2_bijective: bijective(&map.theta2),
        theta3_bijective: bijective(&map.theta3),
    })
}

/// Scaling by a unit a of O/N commutes with every differential and with θ².
pub fn diamond_check(cx: &BianchiComplex, map: &EllipticMap, a: u64) -> Result<bool> {
    if !cx.ring.is_unit(a) {
        return input(format!("{} is not a unit", cx.ring.lift(a)));
    }
    let n = cx.complex.degrees.len();
    let s: Vec<SparseMatQ> = (0..n).map(|k| cx.scaling_matrix(k, a)).collect::<Result<_>>()?;
    for k in 0..n - 1 {
        if cx.complex.diffs[k].mul(&s[k])? != s[k + 1].mul(&cx.complex.diffs[k])? {
            return Ok(false);
        }
    }
    let t = &map.target;
    let scale_sym = |x: &UnitSymbol| match x {
        UnitSymbol::Elliptic(b) => t.e(cx.ring.mul(*b, a)),
        other => other.clone(),
    };
    let pairs = t.wedge_hat.pairs.clone();
    let sw = t.wedge_hat.matrix(&pairs, |(x, y)| Ok(wedge(&scale_sym(x), &scale_sym(y))))?;
    Ok(map.theta2.mul(&s[2])? == sw.mul(&map.theta2)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct H2Dims {
    pub d: u8,
    pub ideal: String,
    pub norm: u64,
    pub qprime: u64,
    pub total: usize,
    pub eis: usize,
    pub cusp: i64,
    /// dim Coker(C₂(P) → Λ²C₁^un(P)) on the formal model.
    pub coker: i64,
    pub image_unramified: bool,
    pub consistent: bool,
    /// dim ker(M¹ → M²) − rank(M⁰ → M¹).
    pub h1: usize,
    pub h1_matches_cusp: bool,
}

pub fn h2_dims(pr: &PrimeIdeal) -> Result<H2Dims> {
    let cx = build_prime(pr)?;
    let qp = cx.ring.qprime();
    let d1 = &cx.complex.diffs[1];
    let total = cx.edges().dim() - d1.rank();
    let eis = 2 * qp as usize - 1;
    let cusp = total as i64 - eis as i64;
    let target = EllipticTarget::new(&cx.ring);
    let tri = cx.triangles().basis.clone();
    let img = target.wedge_hat.matrix(&tri, |g| {
        let Cell::Tri(t) = *g else { return input("not a triangle") };
        Ok(target.delta2_triple(t))
    })?;
    let un = target.wedge_unramified()?;
    let r_un = un.rank();
    let r_img = img.rank();
    let stacked = hstack(&un, &img);
    let image_unramified = stacked.rank() == r_un;
    let coker = r_un as i64 - r_img as i64;
    let h1 = cx.triangles().dim() - d1.rank() - cx.complex.diffs[0].rank();
    Ok(H2Dims {
        d: pr.d,
        ideal: pr.label(),
        norm: pr.norm,
        qprime: qp,
        total,
        eis,
        cusp,
        coker,
        image_unramified,
        consistent: image_unramified && coker == cusp && cusp >= 0,
        h1,
        h1_matches_cusp: h1 as i64 == cusp,
    })
}

fn hstack(a: &SparseMatQ, b: &SparseMatQ) -> SparseMatQ {
    let mut m = SparseMatQ::zeros(a.nrows(), a.ncols() + b.ncols());
    for j in 0..a.ncols() {
        m.set_column(j, a.column(j).clone());
    }
    for j in 0..b.ncols() {
        m.set_column(a.ncols() + j, b.column(j).clone());
    }
    m
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactnessReport {
    pub ideal: String,
    pub sigma_delta_zero: bool,
    /// dim ker Σ / im δ′.
    pub homology_deg3: usize,
    pub ker_delta_is_unramified: bool,
    pub exact: bool,
}

pub fn exactness_deg3(pr: &PrimeIdeal) -> Result<ExactnessReport> {
    let ring = ResidueRing::from_prime(pr)?;
    let t = EllipticTarget::new(&ring);
    let dp = t.delta_prime()?;
    let sigma_delta_zero = t.sigma().mul(&dp)?.is_zero();
    let r = dp.rank();
    let ker_sigma = 2 * t.c1.len() - 1;
    let homology_deg3 = ker_sigma.saturating_sub(r);
    let un = t.wedge_unramified()?;
    let ker_dim = t.wedge_hat.dim() - r;
    let ker_delta_is_unramified = dp.mul(&un)?.is_zero() && un.rank() == ker_dim;
    Ok(ExactnessReport {
        ideal: pr.label(),
        sigma_delta_zero,
        homology_deg3,
        ker_delta_is_unramified,
        exact: sigma_delta_zero && homology_deg3 == 0 && ker_delta_is_unramified,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SurjectivityReport {
    pub ideal: String,
    pub norm: u64,
    pub divisors: Vec<String>,
    pub unit_rank: usize,
    pub dim_edges: usize,
    pub rows: usize,
    pub rank: usize,
    pub full_row_rank: bool,
}

/// Proper divisors (m) of (g), m neither a unit nor an associate of g.
fn proper_divisors(g: ImagQuadInt) -> Vec<ImagQuadInt> {
    let n = g.norm();
    let lim = (2.0 * (n as f64).sqrt()).ceil() as i64 + 1;
    let mut out: Vec<ImagQuadInt> = Vec::new();
    for a in -lim..=lim {
        for b in -lim..=lim {
            let m = qi(g.d, a, b);
            let k = m.norm();
            if k <= 1 || k >= n || n % k != 0 || g.div_exact(&m).is_none() {
                continue;
            }
            let c = m.canonical_associate();
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    out.sort_by_key(|x| (x.norm(), std::cmp::Reverse((x.a, x.b))));
    out
}

/// Degree-2 map (α, β) ↦ e(α)∧e(β) at composite level into Λ²Ĉ₁(N), with C₁(N)
/// the span of e(α) modulo symmetry and distribution relations.
pub fn composite_surjectivity(g: ImagQuadInt) -> Result<SurjectivityReport> {
    let cx = build_bianchi_complex(g.d, g, RelationMode::FullUnits, false)?;
    let top = &cx.ring;
    let divs = proper_divisors(g);
    let rings: Vec<ResidueRing> = std::iter::once(Ok(top.clone())).chain(divs.iter().map(|m| ResidueRing::new(*m))).collect::<Result<_>>()?;
    let mut syms: Vec<(usize, u64)> = Vec::new();
    for (i, r) in rings.iter().enumerate() {
        for c in r.coset_reps() {
            syms.push((i, c));
        }
    }
    let idx = |i: usize, x: u64| syms.iter().position(|s| *s == (i, rings[i].coset_rep(x))).unwrap();
    let mut rels: Vec<Vec<Rational>> = Vec::new();
    for (i, m) in divs.iter().enumerate() {
        let ri = &rings[i + 1];
        let lambda = g.div_exact(m).unwrap();
        for beta in ri.elements().filter(|&b| b != 0) {
            let mut row = vec![Rational::zero(); syms.len()];
            // the M-torsion point β/m is λβ/g
            row[idx(0, top.reduce(&ri.lift(beta).mul(&lambda)))] += q(1);
            row[idx(i + 1, beta)] -= q(1);
            rels.push(row);
            let mut row = vec![Rational::zero(); syms.len()];
            for al in top.elements().filter(|&a| ri.reduce(&top.lift(a)) == beta) {
                row[idx(0, al)] += q(1);
            }
            row[idx(i + 1, beta)] -= q(1);
            rels.push(row);
        }
    }
    let funcs: Vec<Vec<Rational>> = if rels.is_empty() {
        (0..syms.len()).map(|i| (0..syms.len()).map(|j| if i == j { q(1) } else { q(0) }).collect()).collect()
    } else {
        rank_kernel(&SparseMatQ::from_rows(&rels)).1
    };
    let k = funcs.len();
    let coords = |x: u64| -> Vec<Rational> {
        let mut v = vec![Rational::zero(); k + 1];
        if x == 0 {
            v[k] = q(1);
        } else {
            let s = idx(0, x);
            for (i, f) in funcs.iter().enumerate() {
                v[i] = f[s].clone();
            }
        }
        v
    };
    let mut pairs = Vec::new();
    for i in 0..=k {
        for j in i + 1..=k {
            pairs.push((i, j));
        }
    }
    let edges = &cx.edges().basis;
    let mut m = SparseMatQ::zeros(pairs.len(), edges.len());
    for (c, e) in edges.iter().enumerate() {
        let Cell::Edge([a, b]) = *e else { return input("not an edge") };
        let (x, y) = (coords(a), coords(b));
        for (r, &(i, j)) in pairs.iter().enumerate() {
            let v = &x[i] * &y[j] - &x[j] * &y[i];
            if !v.is_zero() {
                m.set(r, c, v);
            }
        }
    }
    let rank = m.rank();
    Ok(SurjectivityReport {
        ideal: top.label(),
        norm: top.norm,
        divisors: divs.iter().map(|x| format!("({})", x)).collect(),
        unit_rank: k,
        dim_edges: edges.len(),
        rows: pairs.len(),
        rank,
        full_row_rank: rank == pairs.len(),
    })
}

pub fn cm_tau(d: u8) -> C {
    if d == 1 {
        C::new(0.0, 1.0)
    } else {
        C::new(0.5, 3f64.sqrt() / 2.0)
    }
}

/// The P-torsion point α̃/π = α̃π̄/N(P) in coordinates (1, τ).
pub fn torsion_point(ring: &ResidueRing, x: u64) -> TorsionPt {
    let w = ring.lift(x).mul(&ring.generator.conj());
    let n = ring.norm as i64;
    TorsionPt::new(qf(w.a, n), qf(w.b, n))
}

#[derive(Clone, Debug)]
pub struct PolyhedronL2 {
    /// Polyhedron basis rows.
    pub rows: Vec<[u64; 2]>,
    /// Diamond twists a ∈ (O/P)^*/μ, one per embedding.
    pub twists: Vec<u64>,
    /// θ¹(∂(g B_d)) at twist 1.
    pub elements: Vec<NumBlochElem>,
    /// values[i][j] = L₂ of row i at twist j.
    pub values: Vec<Vec<f64>>,
    pub cycle_exact: bool,
    /// L₂ of Σ over all cosets at twist 1.
    pub cycle_sum: f64,
}

fn polyhedron_l2(pr: &PrimeIdeal) -> Result<PolyhedronL2> {
    let cx = build_prime(pr)?;
    let ring = &cx.ring;
    let e = EllCurveC::new(cm_tau(pr.d))?;
    let n = ring.norm;
    let avg = if n <= 6 { Average::Full } else { Average::Subgroup };
    let twists = ring.coset_reps();
    let tri = cx.triangles();
    let mut theta: BTreeMap<(usize, u64), NumBlochElem> = BTreeMap::new();
    let mut eval = |i: usize, a: u64| -> Result<NumBlochElem> {
        if let Some(v) = theta.get(&(i, a)) {
            return Ok(v.clone());
        }
        let Cell::Tri(t) = tri.basis[i] else { return input("not a triangle") };
        let p: Vec<TorsionPt> = t.iter().map(|&x| torsion_point(ring, ring.mul(x, a))).collect();
        let v = theta_triple(&e, [&p[0], &p[1], &p[2]], n, avg)?;
        theta.insert((i, a), v.clone());
        Ok(v)
    };
    let mut combine = |c: &BTreeMap<usize, Rational>, a: u64| -> Result<NumBlochElem> {
        let mut out = NumBlochElem::new(TAU_DEDUP);
        for (i, coef) in c {
            out.extend(&eval(*i, a)?, coef);
        }
        Ok(out)
    };
    let rows: Vec<[u64; 2]> = cx.polys().basis.iter().map(|c| if let Cell::Poly(r) = c { *r } else { [0, 0] }).collect();
    let mut values = Vec::new();
    let mut elements = Vec::new();
    for g in &cx.polys().basis {
        let c = tri.project_sum(&poly_boundary(ring, &cx.tess, g)?)?;
        let mut row = Vec::new();
        for (j, &a) in twists.iter().enumerate() {
            let el = combine(&c, a)?;
            row.push(el.eval_l2());
            if j == 0 {
                elements.push(el);
            }
        }
        values.push(row);
    }
    let mut total = FormalSum::zero();
    for r in ring.rows() {
        total = total.add(&poly_boundary(ring, &cx.tess, &Cell::Poly(r))?);
    }
    let tc = tri.project_sum(&total)?;
    let cycle_exact = tc.is_empty();
    let mut cycle_sum = 0.0;
    for r in ring.rows() {
        let c = tri.project_sum(&poly_boundary(ring, &cx.tess, &Cell::Poly(r))?)?;
        cycle_sum += combine(&c, twists[0])?.eval_l2();
    }
    Ok(PolyhedronL2 { rows, twists, elements, values, cycle_exact, cycle_sum })
}

/// Rank of a real matrix by elimination with partial pivoting.
pub fn numeric_rank(m: &[Vec<f64>], tol: f64) -> usize {
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())) else { break };
        if a[p][c].abs() <= tol {
            continue;
        }
        a.swap(rank, p);
        for i in rank + 1..a.len() {
            let f = a[i][c] / a[rank][c];
            for k in c..cols {
                a[i][k] -= f * a[rank][k];
            }
        }
        rank += 1;
    }
    rank
}

pub const ALPHA_RANK_TOL: f64 = 1e-7;

/// Largest torsion order used for θ at CM points.
pub const MAX_CM_TORSION: u64 = 5;

#[derive(Clone, Debug, Serialize)]
pub struct AlphaReport {
    pub d: u8,
    pub ideal: String,
    pub tau: [f64; 2],
    pub polyhedra: usize,
    pub twists: Vec<u64>,
    pub values: Vec<Vec<f64>>,
    pub numeric_rank: usize,
    pub cycle_exact: bool,
    pub cycle_sum: f64,
    #[serde(skip)]
    pub elements: Vec<NumBlochElem>,
}

/// θ¹(∂(g B_d)) at the CM point for every coset translate and embedding.
pub fn alpha_kp(pr: &PrimeIdeal) -> Result<AlphaReport> {
    let p = polyhedron_l2(pr)?;
    let tau = cm_tau(pr.d);
    Ok(AlphaReport {
        d: pr.d,
        ideal: pr.label(),
        tau: [tau.re, tau.im],
        polyhedra: p.rows.len(),
        twists: p.twists.clone(),
        numeric_rank: numeric_rank(&p.values, ALPHA_RANK_TOL),
        values: p.values,
        cycle_exact: p.cycle_exact,
        cycle_sum: p.cycle_sum,
        elements: p.elements,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjectureReport {
    pub d: u8,
    pub ideal: String,
    /// (twist, max over polyhedra of |L₂|).
    pub per_embedding: Vec<(u64, f64)>,
    pub max_abs: f64,
    pub status: CheckStatus,
    pub note: String,
}

/// Informational: the conjecture predicts θ¹(∂(γB_d)) = 0. Never a pass/fail gate.
pub fn conjecture_experiment(pr: &PrimeIdeal) -> ConjectureReport {
    match polyhedron_l2(pr) {
        Ok(p) => {
            let per: Vec<(u64, f64)> = p.twists.iter().enumerate().map(|(j, &a)| (a, p.values.iter().map(|r| r[j].abs()).fold(0.0, f64::max))).collect();
            let max_abs = per.iter().map(|x| x.1).fold(0.0, f64::max);
            ConjectureReport {
                d: pr.d,
                ideal: pr.label(),
                per_embedding: per,
                max_abs,
                status: CheckStatus::Inconclusive,
                note: if max_abs < 1e-6 { "residual below 1e-6".into() } else { "residual above 1e-6".into() },
            }
        }
        Err(e) => ConjectureReport {
            d: pr.d,
            ideal: pr.label(),
            per_embedding: vec![],
            max_abs: f64::NAN,
            status: CheckStatus::Inconclusive,
            note: e.to_string(),
        },
    }
}

/// −Σ_f {r(c, f₀, f₁, f₂)} over faces not containing the apex c.
pub fn cone_element(tess: &TessellationData, apex: P1) -> Result<NumBlochElem> {
    let mut out = NumBlochElem::new(TAU_DEDUP);
    for f in &tess.faces {
        let pts = f.points.map(|c| c.to_p1());
        if pts.iter().any(|p| same_p1(p, &apex)) {
            continue;
        }
        out.insert(cross_ratio(apex, pts[0], pts[1], pts[2])?, q(-1));
    }
    Ok(out)
}

fn same_p1(a: &P1, b: &P1) -> bool {
    match (a, b) {
        (P1::Inf, P1::Inf) => true,
        (P1::Fin(x), P1::Fin(y)) => (x - y).norm() < 1e-12,
        _ => false,
    }
}

/// B_d coned from the cusp ∞ into ideal tetrahedra.
pub fn k3_element(d: u8) -> Result<NumBlochElem> {
    let tess = tessellation_data(d)?;
    for f in &tess.faces {
        if f.points.iter().any(|c| c.is_infinite()) {
            continue;
        }
        let p = f.points.map(|c| c.to_p1());
        if let P1::Fin(z) = cross_ratio(P1::Inf, p[0], p[1], p[2])? {
            if bw_dilog(z) >= 0.0 {
                return Err(Error::Numerical(format!("tetrahedron over face {:?} is not positively oriented", f.cusps)));
            }
        }
    }
    cone_element(&tess, P1::Inf)
}

pub fn volume_polyhedron(d: u8) -> Result<f64> {
    Ok(k3_element(d)?.eval_l2())
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeReport {
    pub d: u8,
    pub volume: f64,
    /// Distinct cross-ratio terms after merging equal tetrahedra.
    pub tetrahedra: usize,
    /// |L₂(cone from a generic apex) − volume|.
    pub cone_independence: f64,
    /// |d/dt L₂(cone from apex c + t·w)| by central differences.
    pub dehn_proxy: f64,
}

pub fn volume_report(d: u8) -> Result<VolumeReport> {
    let tess = tessellation_data(d)?;
    let k3 = k3_element(d)?;
    let volume = k3.eval_l2();
    let c = C::new(0.3141, 0.2718);
    let w = C::new(0.6, -0.8);
    let at = |t: f64| -> Result<f64> { Ok(cone_element(&tess, P1::Fin(c + w * t))?.eval_l2()) };
    let h = 1e-4;
    Ok(VolumeReport {
        d,
        volume,
        tetrahedra: k3.len(),
        cone_independence: (at(0.0)? - volume).abs(),
        dehn_proxy: ((at(h)? - at(-h)?) / (2.0 * h)).abs(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StaticPolyhedron {
    pub d: u8,
    pub parameter: &'static str,
    pub face_kinds: &'static str,
    pub vertical_faces: &'static str,
    pub face_orbits: u8,
}

/// Face data of B_d for d = 2, 7, 11; no complex is built from these.
pub fn static_polyhedra() -> Vec<StaticPolyhedron> {
    vec![
        StaticPolyhedron { d: 2, parameter: "√−2", face_kinds: "triangles and quadrilaterals", vertical_faces: "2 triangular, 2 quadrilateral", face_orbits: 2 },
        StaticPolyhedron { d: 7, parameter: "(1+√−7)/2", face_kinds: "triangles and quadrilaterals", vertical_faces: "2 quadrilateral, 1 triangular", face_orbits: 2 },
        StaticPolyhedron { d: 11, parameter: "(1+√−11)/2", face_kinds: "triangles and hexagons", vertical_faces: "2 hexagonal, 1 triangular", face_orbits: 2 },
    ]
}

/// Full Bianchi suite at one prime: chain integrity, θ-maps, h2 and exactness.
#[derive(Clone, Debug, Serialize)]
pub struct PrimeSuite {
    pub d: u8,
    pub ideal: String,
    pub norm: u64,
    pub dims: [usize; 4],
    pub chain_ok: bool,
    pub dim_m2_formula: bool,
    pub commute: BianchiCommute,
    pub diamond: bool,
    pub h2: H2Dims,
    pub exactness: ExactnessReport,
}

impl PrimeSuite {
    pub fn pass(&self) -> bool {
        self.chain_ok && self.dim_m2_formula && self.commute.all() && self.diamond && self.h2.consistent && self.h2.eis == 2 * self.h2.qprime as usize - 1 && self.exactness.exact
    }
}

pub fn prime_suite(pr: &PrimeIdeal) -> Result<PrimeSuite> {
    let cx = build_prime(pr)?;
    let map = theta_maps(&cx)?;
    let qp = cx.ring.qprime() as usize;
    let dims = cx.complex.dims();
    let mut diamond = true;
    for a in cx.ring.coset_reps() {
        diamond &= diamond_check(&cx, &map, a)?;
    }
    Ok(PrimeSuite {
        d: pr.d,
        ideal: pr.label(),
        norm: pr.norm,
        dims: [dims[0], dims[1], dims[2], dims[3]],
        chain_ok: cx.chain_ok()?,
        dim_m2_formula: cx.edges().dim() == qp * (qp.saturating_sub(1)) / 2 + qp,
        commute: commute_check(&cx, &map)?,
        diamond,
        h2: h2_dims(pr)?,
        exactness: exactness_deg3(pr)?,
    })
}

pub fn field_is_supported(d: u8) -> bool {
    d == 1 || d == 3
}

/// Norm of a rational prime's ideal is prime or a prime square.
pub fn is_prime_norm(n: u64) -> bool {
    is_prime(n) || {
        let r = (n as f64).sqrt().round() as u64;
        r * r == n && is_prime(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfields::primes_up_to_norm;
    use proptest::prelude::*;

    fn prime(d: u8, s: &str) -> PrimeIdeal {
        PrimeIdeal::parse(d, s).unwrap()
    }

    #[test]
    fn tessellation_faces_and_stabilizers() {
        let t3 = tessellation_data(3).unwrap();
        assert_eq!(t3.faces.len(), 4);
        let one = qi(3, 1, 0);
        let zero = qi(3, 0, 0);
        assert_eq!(t3.faces[0].matrix, [one, zero, zero, one]);
        assert_eq!(t3.faces[0].sign, 1);
        let t1 = tessellation_data(1).unwrap();
        assert_eq!(t1.faces.len(), 8);
        for t in [&t1, &t3] {
            assert!(t.boundary_cycle);
            let u = ImagQuadInt::units(t.d).len();
            assert_eq!(t.stabilizer_orders.d1, 6 * u);
            assert_eq!(t.stabilizer_orders.d2, 2 * u * u);
            for f in &t.faces {
                assert!(det(&f.matrix).is_unit());
                for (k, c) in t_vertices(t.d).iter().enumerate() {
                    let img = Cusp::act(&f.matrix, c);
                    assert!(f.points.iter().any(|p| p.same(&img)), "face {:?} vertex {}", f.cusps, k);
                }
            }
        }
        assert_eq!(t1.vertices, vec!["0", "1", "1+i", "i", "∞", "(1+i)/2"]);
    }

    #[test]
    fn flipping_a_face_sign_breaks_the_cycle() {
        let t = tessellation_data(1).unwrap();
        let mut s: Vec<(Mat, i8)> = t.faces.iter().map(|f| (f.matrix, f.sign)).collect();
        s[3].1 = -s[3].1;
        assert!(!is_boundary_cycle(1, &s));
    }

    #[test]
    fn residue_rings() {
        let r = ResidueRing::new(qi(1, 2, 1)).unwrap();
        assert_eq!(r.norm, 5);
        assert!(r.prime);
        assert_eq!(r.qprime(), 1);
        let r = ResidueRing::new(qi(1, 3, 0)).unwrap();
        assert_eq!(r.norm, 9);
        assert_eq!(r.units().len(), 8);
        let r = ResidueRing::new(qi(1, 2, 0)).unwrap();
        assert!(!r.prime);
        assert_eq!(r.units().len(), 2);
        for x in r.elements() {
            assert_eq!(r.reduce(&r.lift(x)), x);
        }
        // 1 − i is a zero divisor mod 2
        let z = r.reduce(&qi(1, 1, -1));
        assert!(!r.primitive(z, z));
        assert!(r.primitive(z, r.one()));
    }

    #[test]
    fn small_prime_dimensions() {
        let cx = build_prime(&prime(1, "1+i")).unwrap();
        assert_eq!(cx.dims(), (0, 1, Some(2)));
        let cx = build_prime(&prime(3, "2-ρ")).unwrap();
        assert_eq!(cx.ring.qprime(), 1);
        assert_eq!(cx.dims().2, Some(2));
        assert!(cx.chain_ok().unwrap());
    }

    #[test]
    fn suite_at_all_primes_up_to_13() {
        for d in [1u8, 3] {
            for pr in primes_up_to_norm(d, 13).unwrap() {
                let s = prime_suite(&pr).unwrap();
                assert!(s.pass(), "{:?}", s);
            }
        }
    }

    #[test]
    fn diagonal_edges_at_least_as_large() {
        let pr = prime(1, "2+i");
        let full = build_prime(&pr).unwrap();
        let lit = build_bianchi_complex(1, pr.generator, RelationMode::Diagonal, true).unwrap();
        assert!(lit.edges().dim() >= full.edges().dim());
    }

    #[test]
    fn prime_power_levels_are_surjective() {
        for g in [qi(1, 2, 0), qi(1, 2, 2), qi(1, 4, 0), qi(3, 3, -3), qi(3, 4, 0)] {
            let r = composite_surjectivity(g).unwrap();
            assert!(r.full_row_rank, "{:?}", r);
        }
        // two distinct prime factors: the norm relations kill e(α) at units
        let r = composite_surjectivity(qi(1, 1, 3)).unwrap();
        assert_eq!((r.rank, r.rows), (1, 3));
        assert!(build_bianchi_complex(1, qi(1, 2, 0), RelationMode::FullUnits, true).is_err());
    }

    #[test]
    fn composite_chain_integrity() {
        let cx = build_bianchi_complex(1, qi(1, 2, 0), RelationMode::FullUnits, false).unwrap();
        assert!(cx.chain_ok().unwrap());
    }

    #[test]
    fn volumes() {
        let v3 = volume_report(3).unwrap();
        assert!((v3.volume - 1.0149416).abs() < 1e-6, "{}", v3.volume);
        assert_eq!(v3.tetrahedra, 1);
        let v1 = volume_report(1).unwrap();
        assert!((v1.volume - 3.6638624).abs() < 1e-6, "{}", v1.volume);
        for v in [&v1, &v3] {
            assert!(v.cone_independence < 1e-9, "{:?}", v);
            assert!(v.dehn_proxy < 1e-6, "{:?}", v);
        }
        let flat = cross_ratio(P1::Inf, P1::c(0.0, 0.0), P1::c(1.0, 0.0), P1::c(2.5, 0.0)).unwrap();
        assert_eq!(crate::bloch::bw_dilog_p1(flat), 0.0);
    }

    #[test]
    fn torsion_points_have_order_dividing_norm() {
        let pr = prime(3, "2-ρ");
        let r = ResidueRing::from_prime(&pr).unwrap();
        for x in r.elements() {
            assert_eq!(3 % torsion_point(&r, x).order(), 0);
        }
        let pr = prime(1, "2+i");
        let r = ResidueRing::from_prime(&pr).unwrap();
        // α ↦ α̃/π is additive
        let (a, b) = (r.lift(2), r.lift(3));
        let s = torsion_point(&r, r.add(2, 3));
        let _ = (a, b);
        assert_eq!(s, torsion_point(&r, 2).add(&torsion_point(&r, 3)));
    }

    #[test]
    fn alpha_at_the_eisenstein_prime_of_norm_3() {
        let a = alpha_kp(&prime(3, "2-ρ")).unwrap();
        assert!(a.cycle_exact);
        assert!(a.cycle_sum.abs() < 1e-6);
        assert_eq!(a.values.len(), a.polyhedra);
        let c = conjecture_experiment(&prime(3, "2-ρ"));
        assert_eq!(c.status, CheckStatus::Inconclusive);
        assert_eq!(c.per_embedding.len(), 1);
    }

    #[test]
    fn numeric_rank_of_small_matrices() {
        assert_eq!(numeric_rank(&[vec![1.0, 2.0], vec![2.0, 4.0]], 1e-9), 1);
        assert_eq!(numeric_rank(&[vec![1.0, 0.0], vec![0.0, 1e-12]], 1e-9), 1);
        assert_eq!(numeric_rank(&[vec![0.0]], 1e-9), 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn diamonds_intertwine(d in prop::sample::select(vec![1u8, 3]), k in 0usize..4, j in 0usize..8) {
            let ps = primes_up_to_norm(d, 13).unwrap();
            let pr = &ps[k % ps.len()];
            let cx = build_prime(pr).unwrap();
            let map = theta_maps(&cx).unwrap();
            let reps = cx.ring.coset_reps();
            prop_assert!(diamond_check(&cx, &map, reps[j % reps.len()]).unwrap());
        }
    }
}
