//! Bloch group elements, δ₂, the double logarithm and the Bloch–Wigner
//! dilogarithm, with the identity suites at roots of unity.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{input, Error, Result};
use crate::numberfields::{gcd, rational_to_f64, CycloNum};
use crate::qlinalg::{q, qf, FormalSum, Rational};
use crate::units::{independent_columns, wedge_sums, CycloUnits, UnitSymbol, Wedge2};

pub const TAU_DEDUP: f64 = 1e-9;

/// Point of the complex projective line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum P1 {
    Fin(Complex64),
    Inf,
}

impl P1 {
    pub fn c(re: f64, im: f64) -> P1 {
        P1::Fin(Complex64::new(re, im))
    }

    fn hom(&self) -> (Complex64, Complex64) {
        match self {
            P1::Fin(z) => (*z, Complex64::new(1.0, 0.0)),
            P1::Inf => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        }
    }
}

fn det(p: &P1, q: &P1) -> Complex64 {
    let (a, b) = p.hom();
    let (c, d) = q.hom();
    a * d - c * b
}

/// r(a,b,c,d) = (a−c)(b−d)/((a−d)(b−c)), so r(∞,0,1,x) = x.
pub fn cross_ratio(a: P1, b: P1, c: P1, d: P1) -> Result<P1> {
    let num = det(&a, &c) * det(&b, &d);
    let den = det(&a, &d) * det(&b, &c);
    match (num == Complex64::new(0.0, 0.0), den == Complex64::new(0.0, 0.0)) {
        (true, true) => Err(Error::Input("degenerate configuration: cross-ratio 0/0".into())),
        (_, true) => Ok(P1::Inf),
        _ => Ok(P1::Fin(num / den)),
    }
}

/// Exact cross-ratio of points in Q(ζ_N) ∪ {∞}; `None` is ∞.
pub fn cross_ratio_exact(
    a: &Option<CycloNum>,
    b: &Option<CycloNum>,
    c: &Option<CycloNum>,
    d: &Option<CycloNum>,
) -> Result<Option<CycloNum>> {
    let level = [a, b, c, d].iter().find_map(|x| x.as_ref().map(|y| y.level())).unwrap_or(1);
    let diff = |p: &Option<CycloNum>, r: &Option<CycloNum>| -> CycloNum {
        match (p, r) {
            (Some(x), Some(y)) => x.sub(y),
            (None, None) => CycloNum::zero(level),
            _ => CycloNum::one(level),
        }
    };
    let num = diff(a, c).mul(&diff(b, d));
    let den = diff(a, d).mul(&diff(b, c));
    match (num.is_zero(), den.is_zero()) {
        (true, true) => Err(Error::Input("degenerate configuration: cross-ratio 0/0".into())),
        (_, true) => Ok(None),
        _ => Ok(Some(num.mul(&den.inv()?))),
    }
}

fn bernoulli_coeffs() -> &'static [f64] {
    static C: OnceLock<Vec<f64>> = OnceLock::new();
    C.get_or_init(|| {
        // B_{2k}/(2k+1)! for k = 1..=30
        let m = 61usize;
        let mut b: Vec<Rational> = vec![q(1)];
        let binom = |n: usize, k: usize| -> BigInt {
            let mut r = BigInt::one();
            for i in 0..k {
                r = r * BigInt::from(n - i) / BigInt::from(i + 1);
            }
            r
        };
        for n in 1..m {
            let mut s = Rational::zero();
            for (j, bj) in b.iter().enumerate() {
                s += Rational::from_integer(binom(n + 1, j)) * bj;
            }
            b.push(-s / Rational::from_integer(BigInt::from(n + 1)));
        }
        let mut fact = BigInt::one();
        let mut out = Vec::new();
        for n in 1..=m {
            fact *= BigInt::from(n);
            if n % 2 == 1 && n >= 3 {
                let k2 = n - 1;
                out.push(rational_to_f64(&(b[k2].clone() / Rational::from_integer(fact.clone()))));
            }
        }
        out
    })
}

/// Li₂(z) for |z| ≤ 1, Re z ≤ 1/2, via the Bernoulli series in −log(1−z).
fn li2_reduced(z: Complex64) -> Complex64 {
    let w = -(Complex64::new(1.0, 0.0) - z).ln();
    let w2 = w * w;
    let mut acc = w - w2 / 4.0;
    let mut p = w;
    for c in bernoulli_coeffs() {
        p *= w2;
        let t = p * *c;
        acc += t;
        if t.norm() < 1e-18 * acc.norm().max(1e-300) {
            break;
        }
    }
    acc
}

/// Bloch–Wigner dilogarithm Im Li₂(z) + arg(1−z)·log|z|; 0 at 0, 1, ∞ and on the real line.
pub fn bw_dilog(z: Complex64) -> f64 {
    if !z.re.is_finite() || !z.im.is_finite() || z.im == 0.0 {
        return 0.0;
    }
    if z.norm_sqr() > 1.0 {
        return -bw_dilog(Complex64::new(1.0, 0.0) / z);
    }
    if z.re > 0.5 {
        return -bw_dilog(Complex64::new(1.0, 0.0) - z);
    }
    li2_reduced(z).im + (Complex64::new(1.0, 0.0) - z).arg() * z.norm().ln()
}

pub fn bw_dilog_p1(x: P1) -> f64 {
    match x {
        P1::Fin(z) => bw_dilog(z),
        P1::Inf => 0.0,
    }
}

/// Formal sum of {x}₂ with exact arguments in Q(ζ_N).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BlochElem {
    pub terms: FormalSum<CycloNum>,
    /// Number of arguments dropped as 0, 1 or ∞.
    pub dropped: usize,
}

impl BlochElem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, x: Option<CycloNum>, c: Rational) {
        match x {
            Some(v) if !v.is_zero() && v != CycloNum::one(v.level()) => self.terms.add_term(v, c),
            _ => self.dropped += 1,
        }
    }

    pub fn add(&self, o: &BlochElem) -> BlochElem {
        BlochElem { terms: self.terms.add(&o.terms), dropped: self.dropped + o.dropped }
    }

    pub fn add_scaled(&mut self, o: &BlochElem, c: &Rational) {
        self.terms.add_assign_scaled(&o.terms, c);
        self.dropped += o.dropped;
    }

    pub fn scale(&self, c: &Rational) -> BlochElem {
        BlochElem { terms: self.terms.scale(c), dropped: self.dropped }
    }

    pub fn sub(&self, o: &BlochElem) -> BlochElem {
        self.add(&o.scale(&q(-1)))
    }

    /// Σ c·L₂(σ_k(x)).
    pub fn eval_l2(&self, k: i64) -> Result<f64> {
        let mut s = 0.0;
        for (x, c) in self.terms.iter() {
            s += rational_to_f64(c) * bw_dilog(x.embed(k)?);
        }
        Ok(s)
    }

    pub fn to_numeric(&self, k: i64) -> Result<NumBlochElem> {
        let mut out = NumBlochElem::new(TAU_DEDUP);
        for (x, c) in self.terms.iter() {
            out.insert(P1::Fin(x.embed(k)?), c.clone());
        }
        Ok(out)
    }
}

/// Formal sum of {z}₂ with complex arguments merged within a tolerance.
#[derive(Clone, Debug)]
pub struct NumBlochElem {
    pub terms: Vec<(Complex64, Rational)>,
    pub tau: f64,
    pub dropped: usize,
}

impl NumBlochElem {
    pub fn new(tau: f64) -> Self {
        NumBlochElem { terms: Vec::new(), tau, dropped: 0 }
    }

    pub fn insert(&mut self, x: P1, c: Rational) {
        let z = match x {
            P1::Fin(z) if z.norm() >= self.tau && (z - 1.0).norm() >= self.tau && z.norm() <= 1.0 / self.tau => z,
            _ => {
                self.dropped += 1;
                return;
            }
        };
        if c.is_zero() {
            return;
        }
        if let Some(i) = self.terms.iter().position(|(w, _)| (w - z).norm() < self.tau) {
            self.terms[i].1 += c;
            if self.terms[i].1.is_zero() {
                self.terms.remove(i);
            }
        } else {
            self.terms.push((z, c));
        }
    }

    pub fn extend(&mut self, o: &NumBlochElem, c: &Rational) {
        for (z, d) in &o.terms {
            self.insert(P1::Fin(*z), d * c);
        }
        self.dropped += o.dropped;
    }

    pub fn eval_l2(&self) -> f64 {
        self.terms.iter().map(|(z, c)| rational_to_f64(c) * bw_dilog(*z)).sum()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// δ₂{x} = (1−x)∧x, with coordinates in C₁(N) ⊗ Q.
pub fn delta2(b: &BlochElem, lattice: &CycloUnits) -> Result<Wedge2<UnitSymbol>> {
    let mut out = FormalSum::zero();
    for (x, c) in b.terms.iter() {
        let one_minus = CycloNum::one(x.level()).sub(x);
        let w = wedge_sums(&lattice.factor(&one_minus)?, &lattice.factor(x)?);
        out.add_assign_scaled(&w, c);
    }
    Ok(out)
}

/// Li₁,₁(x,y) = {(xy−y)/(1−y)} − {y/(y−1)} − {xy}.
pub fn li11_exact(x: &CycloNum, y: &CycloNum) -> BlochElem {
    let n = x.level();
    let one = CycloNum::one(n);
    let mut b = BlochElem::new();
    let xy = x.mul(y);
    if y == &one {
        b.dropped += 2;
    } else {
        let t1 = xy.sub(y).mul(&one.sub(y).inv().expect("1 − y ≠ 0"));
        let t2 = y.mul(&y.sub(&one).inv().expect("y − 1 ≠ 0"));
        b.insert(Some(t1), q(1));
        b.insert(Some(t2), q(-1));
    }
    b.insert(Some(xy), q(-1));
    b
}

/// I₁,₁(a₁:a₂:a₃) = Li₁,₁(a₂/a₁, a₃/a₂).
pub fn i11_exact(a1: &CycloNum, a2: &CycloNum, a3: &CycloNum) -> Result<BlochElem> {
    Ok(li11_exact(&a2.try_div(a1)?, &a3.try_div(a2)?))
}

pub fn li11_num(x: Complex64, y: Complex64, tau: f64) -> NumBlochElem {
    let mut b = NumBlochElem::new(tau);
    let one = Complex64::new(1.0, 0.0);
    let xy = x * y;
    if (y - one).norm() < tau {
        b.dropped += 2;
    } else {
        b.insert(P1::Fin((xy - y) / (one - y)), q(1));
        b.insert(P1::Fin(y / (y - one)), q(-1));
    }
    b.insert(P1::Fin(xy), q(-1));
    b
}

pub fn i11_num(a1: Complex64, a2: Complex64, a3: Complex64, tau: f64) -> NumBlochElem {
    li11_num(a2 / a1, a3 / a2, tau)
}

/// (1−a)∧(1−b) + (1−b)∧(1−c) + (1−c)∧(1−a) with a = ζ^α, b = ζ^β, c = (ab)^{−1},
/// in Λ²Ĉ₁(N); 1 − 1 is the formal zero symbol.
pub fn coproduct_rhs(lattice: &CycloUnits, alpha: i64, beta: i64) -> Wedge2<UnitSymbol> {
    let gamma = -(alpha + beta);
    let (ua, ub, uc) = (lattice.u(alpha), lattice.u(beta), lattice.u(gamma));
    wedge_sums(&ua, &ub).add(&wedge_sums(&ub, &uc)).add(&wedge_sums(&uc, &ua))
}

/// Σ_{i=1..5} (−1)^i {r(x₁,…,x̂ᵢ,…,x₅)}.
pub fn five_term(x: &[P1; 5], tau: f64) -> Result<NumBlochElem> {
    for i in 0..5 {
        for j in i + 1..5 {
            if det(&x[i], &x[j]) == Complex64::new(0.0, 0.0) {
                return input(format!("five_term: points {} and {} coincide", i + 1, j + 1));
            }
        }
    }
    let mut out = NumBlochElem::new(tau);
    for i in 0..5 {
        let rest: Vec<P1> = (0..5).filter(|&j| j != i).map(|j| x[j]).collect();
        let r = cross_ratio(rest[0], rest[1], rest[2], rest[3])?;
        let sign = if (i + 1) % 2 == 0 { 1 } else { -1 };
        out.insert(r, q(sign));
    }
    Ok(out)
}

/// Values for which the averaging lemma can be tested.
pub trait AveragingValue: Clone {
    fn zero() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn magnitude(&self) -> f64;
}

impl AveragingValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl<K: Ord + Clone> AveragingValue for FormalSum<K> {
    fn zero() -> Self {
        FormalSum::zero()
    }
    fn add(&self, o: &Self) -> Self {
        FormalSum::add(self, o)
    }
    fn neg(&self) -> Self {
        FormalSum::neg(self)
    }
    fn magnitude(&self) -> f64 {
        self.iter().map(|(_, c)| rational_to_f64(c).abs()).sum()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AveragingReport {
    pub order: u64,
    pub max_deviation: f64,
    pub hypothesis_defect: f64,
}

/// Σ_{x∈Z/n} Φ(a:b:x) over all (a,b), after checking Φ(−a:−b:−c) = Φ(a:b:c),
/// Φ(b:a:c) = −Φ(a:b:c) and shift invariance on every triple.
pub fn averaging_check<V: AveragingValue>(
    n: u64,
    phi: impl Fn(i64, i64, i64) -> V,
    tol: f64,
) -> Result<AveragingReport> {
    let n_i = n as i64;
    let m = |x: i64| x.rem_euclid(n_i);
    let mut defect: f64 = 0.0;
    for a in 0..n_i {
        for b in 0..n_i {
            for c in 0..n_i {
                let v = phi(a, b, c);
                defect = defect.max(phi(m(-a), m(-b), m(-c)).add(&v.neg()).magnitude());
                defect = defect.max(phi(b, a, c).add(&v).magnitude());
                for s in 1..n_i {
                    defect = defect.max(phi(m(a + s), m(b + s), m(c + s)).add(&v.neg()).magnitude());
                }
            }
        }
    }
    if defect > tol {
        return input(format!("averaging_check: Φ violates the hypotheses (defect {:.3e})", defect));
    }
    let mut worst: f64 = 0.0;
    for a in 0..n_i {
        for b in 0..n_i {
            let mut s = V::zero();
            for x in 0..n_i {
                s = s.add(&phi(a, b, x));
            }
            worst = worst.max(s.magnitude());
        }
    }
    Ok(AveragingReport { order: n, max_deviation: worst, hypothesis_defect: defect })
}

/// L₂(ζ^{jk}) columns used to reduce residuals modulo the classes {ζ^j}₂.
fn depth_one_columns(n: u64, ks: &[i64]) -> (Vec<i64>, Vec<Vec<f64>>) {
    let all: Vec<i64> = (1..=(n as i64) / 2).collect();
    let cols: Vec<Vec<f64>> = all
        .iter()
        .map(|&j| ks.iter().map(|&k| bw_dilog(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64))).collect())
        .collect();
    let idx = independent_columns(&cols, 1e-9);
    (idx.iter().map(|&i| all[i]).collect(), idx.iter().map(|&i| cols[i].clone()).collect())
}

/// Distance of per-embedding values, indexed by k ∈ (Z/N)^* ascending, from the
/// (1/2N)Z-span of the classes {ζ^j}₂.
pub fn depth_one_distance(n: u64, vals: &[f64]) -> Result<f64> {
    let ks: Vec<i64> = (1..n as i64).filter(|&k| gcd(k, n as i64) == 1).collect();
    if vals.len() != ks.len() {
        return input(format!("expected {} embedding values, got {}", ks.len(), vals.len()));
    }
    let (_, cols) = depth_one_columns(n, &ks);
    let scale = 2.0 * n as f64;
    let c: Vec<f64> = solve_square_or_ls(&cols, vals).iter().map(|x| (x * scale).round() / scale).collect();
    Ok(vals
        .iter()
        .enumerate()
        .map(|(i, v)| (v - cols.iter().zip(&c).map(|(col, w)| col[i] * w).sum::<f64>()).abs())
        .fold(0.0, f64::max))
}

fn solve_square_or_ls(cols: &[Vec<f64>], rhs: &[f64]) -> Vec<f64> {
    let r = cols.len();
    if r == 0 {
        return vec![];
    }
    let mut a = vec![vec![0.0; r + 1]; r];
    for i in 0..r {
        for j in 0..r {
            a[i][j] = cols[i].iter().zip(&cols[j]).map(|(x, y)| x * y).sum();
        }
        a[i][r] = cols[i].iter().zip(rhs).map(|(x, y)| x * y).sum();
    }
    for c in 0..r {
        let p = (c..r).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        for i in 0..r {
            if i != c {
                let f = a[i][c] / a[c][c];
                for j in c..=r {
                    a[i][j] -= f * a[c][j];
                }
            }
        }
    }
    (0..r).map(|i| a[i][r] / a[i][i]).collect()
}

/// Result of checking an identity at roots of unity.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub level: u64,
    pub tuples: usize,
    /// max over tuples and embeddings of |L₂(lhs − rhs)|.
    pub literal_residual: f64,
    /// Residual after subtracting a combination of L₂(ζ^j) with coefficients in (1/2N)Z.
    pub reduced_residual: f64,
    /// Largest denominator of the depth-one coefficients (times 2N).
    pub max_coefficient_scaled: f64,
    /// δ₂ of lhs − rhs vanishes exactly in Λ²C₁(N) for every tuple.
    pub delta2_vanishes: bool,
}

struct ResidualAccumulator {
    n: u64,
    ks: Vec<i64>,
    cols: Vec<Vec<f64>>,
    literal: f64,
    reduced: f64,
    max_coef: f64,
    delta_ok: bool,
    tuples: usize,
}

impl ResidualAccumulator {
    fn new(n: u64) -> Self {
        let ks: Vec<i64> = (1..n as i64).filter(|&k| gcd(k, n as i64) == 1).collect();
        let (_, cols) = depth_one_columns(n, &ks);
        ResidualAccumulator { n, ks, cols, literal: 0.0, reduced: 0.0, max_coef: 0.0, delta_ok: true, tuples: 0 }
    }

    fn push(&mut self, r: &BlochElem, lattice: &CycloUnits) -> Result<()> {
        self.tuples += 1;
        let vals: Vec<f64> = self.ks.iter().map(|&k| r.eval_l2(k)).collect::<Result<_>>()?;
        self.literal = vals.iter().fold(self.literal, |m, v| m.max(v.abs()));
        let c = solve_square_or_ls(&self.cols, &vals);
        let scale = 2.0 * self.n as f64;
        let cr: Vec<f64> = c.iter().map(|x| (x * scale).round() / scale).collect();
        for x in &cr {
            self.max_coef = self.max_coef.max((x * scale).abs());
        }
        for (i, v) in vals.iter().enumerate() {
            let fit: f64 = self.cols.iter().zip(&cr).map(|(col, w)| col[i] * w).sum();
            self.reduced = self.reduced.max((v - fit).abs());
        }
        if !delta2(r, lattice)?.is_zero() {
            self.delta_ok = false;
        }
        Ok(())
    }

    fn report(&self) -> IdentityReport {
        IdentityReport {
            level: self.n,
            tuples: self.tuples,
            literal_residual: self.literal,
            reduced_residual: self.reduced,
            max_coefficient_scaled: self.max_coef,
            delta2_vanishes: self.delta_ok,
        }
    }
}

fn roots(n: u64) -> Vec<CycloNum> {
    (0..n as i64).map(|k| CycloNum::zeta_pow(n, k)).collect()
}

/// Σ_{i=0..3} (−1)^i I₁,₁(a₀:…:âᵢ:…:a₃) − {r(a₀,a₁,a₂,a₃)} over distinct N-th roots of unity.
pub fn i11_alternation_identity(n: u64) -> Result<IdentityReport> {
    let lattice = CycloUnits::get(n);
    let z = roots(n);
    let mut acc = ResidualAccumulator::new(n);
    let idx: Vec<usize> = (0..n as usize).collect();
    for &i0 in &idx {
        for &i1 in &idx {
            for &i2 in &idx {
                for &i3 in &idx {
                    let t = [i0, i1, i2, i3];
                    if (0..4).any(|i| (i + 1..4).any(|j| t[i] == t[j])) {
                        continue;
                    }
                    let a: Vec<&CycloNum> = t.iter().map(|&i| &z[i]).collect();
                    let mut r = BlochElem::new();
                    for i in 0..4 {
                        let rest: Vec<&CycloNum> = (0..4).filter(|&j| j != i).map(|j| a[j]).collect();
                        let sign = if i % 2 == 0 { q(1) } else { q(-1) };
                        r.add_scaled(&i11_exact(rest[0], rest[1], rest[2])?, &sign);
                    }
                    let cr = cross_ratio_exact(&Some(a[0].clone()), &Some(a[1].clone()), &Some(a[2].clone()), &Some(a[3].clone()))?;
                    r.insert(cr, q(-1));
                    acc.push(&r, &lattice)?;
                }
            }
        }
    }
    Ok(acc.report())
}

/// (1/N) Σ_{x^N=1} {r(a₁,a₂,a₃,x)} + I₁,₁(a₁:a₂:a₃) over distinct N-th roots of unity.
/// Summing the alternation identity over x forces the plus sign; δ₂ confirms it.
pub fn cross_ratio_average_identity(n: u64) -> Result<IdentityReport> {
    let lattice = CycloUnits::get(n);
    let z = roots(n);
    let mut acc = ResidualAccumulator::new(n);
    let nn = n as usize;
    for i1 in 0..nn {
        for i2 in 0..nn {
            for i3 in 0..nn {
                if i1 == i2 || i2 == i3 || i1 == i3 {
                    continue;
                }
                let mut r = BlochElem::new();
                let w = qf(1, n as i64);
                for x in &z {
                    match cross_ratio_exact(&Some(z[i1].clone()), &Some(z[i2].clone()), &Some(z[i3].clone()), &Some(x.clone())) {
                        Ok(cr) => r.insert(cr, w.clone()),
                        Err(_) => r.dropped += 1,
                    }
                }
                r.add_scaled(&i11_exact(&z[i1], &z[i2], &z[i3])?, &q(1));
                acc.push(&r, &lattice)?;
            }
        }
    }
    Ok(acc.report())
}

/// Checks δ₂(Li₁,₁(ζ^α, ζ^β)) against the coproduct formula for all (α, β) at level N.
/// Returns the number of failing pairs.
pub fn coproduct_check(n: u64) -> Result<usize> {
    let lattice = CycloUnits::get(n);
    let mut bad = 0;
    for a in 0..n as i64 {
        for b in 0..n as i64 {
            let lhs = delta2(&li11_exact(&CycloNum::zeta_pow(n, a), &CycloNum::zeta_pow(n, b)), &lattice)?;
            if lhs != coproduct_rhs(&lattice, a, b) {
                bad += 1;
            }
        }
    }
    Ok(bad)
}

/// The real-valued pairing f(u)g(v) − g(u)f(v) on differences, with f, g odd.
pub fn pairing_phi(n: u64) -> impl Fn(i64, i64, i64) -> f64 {
    let f = move |x: i64| bw_dilog(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * x as f64 / n as f64));
    let g = move |x: i64| bw_dilog(Complex64::from_polar(1.0, 4.0 * std::f64::consts::PI * x as f64 / n as f64));
    move |a, b, c| {
        let w = |u: i64, v: i64| f(u) * g(v) - g(u) * f(v);
        w(b - a, c - b) + w(c - b, a - c) + w(a - c, b - a)
    }
}

/// Φ(a:b:c) = δ₂ I₁,₁(ζ^a:ζ^b:ζ^c) in Λ²Ĉ₁(N).
pub fn i11_coproduct_phi(n: u64) -> impl Fn(i64, i64, i64) -> Wedge2<UnitSymbol> {
    let lattice = CycloUnits::get(n);
    move |a, b, c| coproduct_rhs(&lattice, b - a, c - b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use crate::units::wedge;

    const CATALAN: f64 = 0.915_965_594_177_219_015_054_603_514_932_384_110_774;

    /// Oracle: Im Li₂ by direct summation for |z| < 1/2.
    fn bw_direct(z: Complex64) -> f64 {
        let mut s = Complex64::new(0.0, 0.0);
        let mut p = z;
        for k in 1..200 {
            s += p / ((k * k) as f64);
            p *= z;
        }
        s.im + (Complex64::new(1.0, 0.0) - z).arg() * z.norm().ln()
    }

    #[test]
    fn catalan() {
        assert!((bw_dilog(Complex64::new(0.0, 1.0)) - CATALAN).abs() < 1e-14);
        // oracle: alternating series Σ (−1)^k/(2k+1)² with a tail correction
        let mut s = 0.0;
        let terms = 200000;
        for k in 0..terms {
            let t = 1.0 / ((2 * k + 1) as f64).powi(2);
            s += if k % 2 == 0 { t } else { -t };
        }
        assert!((bw_dilog(Complex64::new(0.0, 1.0)) - s).abs() < 1e-10);
    }

    #[test]
    fn bw_symmetries() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let z = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            assert!((bw_dilog(z) + bw_dilog(z.conj())).abs() < 1e-13);
            assert!((bw_dilog(z) + bw_dilog(1.0 / z)).abs() < 1e-13);
            assert!((bw_dilog(z) + bw_dilog(1.0 - z)).abs() < 1e-13);
        }
        for x in [-2.0, -0.5, 0.25, 0.5, 2.0, 10.0] {
            assert_eq!(bw_dilog(Complex64::new(x, 0.0)), 0.0);
        }
    }

    #[test]
    fn bw_against_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let r = rng.gen_range(0.01..0.45);
            let t = rng.gen_range(-3.1..3.1);
            let z = Complex64::from_polar(r, t);
            assert!((bw_dilog(z) - bw_direct(z)).abs() < 1e-13, "{z}");
        }
    }

    #[test]
    fn eisenstein_value() {
        // maximum of L₂, attained at e^{iπ/3}: 1.0149416064096536...
        let z = Complex64::from_polar(1.0, std::f64::consts::PI / 3.0);
        assert!((bw_dilog(z) - 1.014_941_606_409_653_6).abs() < 1e-13);
    }

    #[test]
    fn cross_ratio_normalization() {
        let x = Complex64::new(0.3, 0.7);
        let r = cross_ratio(P1::Inf, P1::c(0.0, 0.0), P1::c(1.0, 0.0), P1::Fin(x)).unwrap();
        assert_eq!(r, P1::Fin(x));
        let r = cross_ratio(P1::c(0.0, 0.0), P1::c(1.0, 0.0), P1::Inf, P1::c(2.0, 0.0)).unwrap();
        assert_eq!(r, P1::c(0.5, 0.0));
        let r = cross_ratio(P1::c(1.0, 0.0), P1::c(2.0, 0.0), P1::c(3.0, 0.0), P1::c(1.0, 0.0)).unwrap();
        assert_eq!(r, P1::Inf);
        assert!(cross_ratio(P1::c(1.0, 0.0), P1::c(1.0, 0.0), P1::c(1.0, 0.0), P1::c(2.0, 0.0)).is_err());
    }

    #[test]
    fn cross_ratio_three_point_formula() {
        // r(0, a2, a3, a1) = a3(a2 − a1)/(a1(a2 − a3))
        let (a1, a2, a3) = (Complex64::new(0.2, 1.1), Complex64::new(-0.7, 0.4), Complex64::new(1.3, -0.2));
        let P1::Fin(r) = cross_ratio(P1::c(0.0, 0.0), P1::Fin(a2), P1::Fin(a3), P1::Fin(a1)).unwrap() else { panic!() };
        assert!((r - a3 * (a2 - a1) / (a1 * (a2 - a3))).norm() < 1e-14);
    }

    #[test]
    fn delta2_trivial_cases() {
        let mut b = BlochElem::new();
        b.insert(Some(CycloNum::from_rational(2, qf(1, 2))), q(1));
        // δ₂{1/2} = (1/2)∧(1/2) = 0
        assert!(delta2(&b, &CycloUnits::get(2)).unwrap().is_zero());
    }

    #[test]
    fn degenerate_args_dropped() {
        let mut b = BlochElem::new();
        b.insert(None, q(1));
        b.insert(Some(CycloNum::zero(5)), q(1));
        b.insert(Some(CycloNum::one(5)), q(1));
        assert!(b.terms.is_zero());
        assert_eq!(b.dropped, 3);
        let one = CycloNum::one(5);
        let t = i11_exact(&one, &one, &one).unwrap();
        assert!(t.terms.is_zero());
    }

    #[test]
    fn li11_minus_one() {
        let v = li11_num(Complex64::new(-1.0, 0.0), Complex64::new(-1.0, 0.0), TAU_DEDUP).eval_l2();
        assert!(v.is_finite());
    }

    #[test]
    fn coproduct_exact_small_levels() {
        for n in 1..=7 {
            assert_eq!(coproduct_check(n).unwrap(), 0, "level {}", n);
        }
    }

    #[test]
    fn coproduct_zeta5_example() {
        let l = CycloUnits::get(5);
        let lhs = delta2(&li11_exact(&CycloNum::zeta_pow(5, 1), &CycloNum::zeta_pow(5, 2)), &l).unwrap();
        let u = |a| UnitSymbol::cyclo(5, a);
        // c = ζ^{-3}: u(1)∧u(2) + u(2)∧u(3) + u(3)∧u(1) = u1∧u2 + u2∧u2 + u2∧u1 = 0
        let expect = wedge(&u(1), &u(2)).add(&wedge(&u(2), &u(-3))).add(&wedge(&u(-3), &u(1)));
        assert_eq!(lhs, expect);
        let lhs = delta2(&li11_exact(&CycloNum::zeta_pow(7, 1), &CycloNum::zeta_pow(7, 2)), &CycloUnits::get(7)).unwrap();
        assert!(!lhs.is_zero());
    }

    #[test]
    fn five_term_examples() {
        let pts = [P1::Inf, P1::c(0.0, 0.0), P1::c(1.0, 0.0), P1::c(2.0, 0.0), P1::c(3.0, 0.0)];
        assert!(five_term(&pts, TAU_DEDUP).unwrap().eval_l2().abs() < 1e-10);
        let pts = [P1::c(0.1, 0.2), P1::c(0.0, 0.0), P1::c(1.0, 0.0), P1::c(0.1, 0.2), P1::c(3.0, 0.0)];
        assert!(five_term(&pts, TAU_DEDUP).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let mut p = [P1::Inf; 5];
            for x in p.iter_mut() {
                *x = P1::c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            }
            assert!(five_term(&p, TAU_DEDUP).unwrap().eval_l2().abs() < 1e-9);
        }
    }

    #[test]
    fn averaging_examples() {
        let r = averaging_check(5, i11_coproduct_phi(5), 0.0).unwrap();
        assert_eq!(r.max_deviation, 0.0);
        let r = averaging_check(2, |_, _, _| 0.0f64, 0.0).unwrap();
        assert_eq!(r.max_deviation, 0.0);
        let r = averaging_check(7, pairing_phi(7), 1e-12).unwrap();
        assert!(r.max_deviation < 1e-9);
        // the bare cross-ratio class is odd under negation, so the hypotheses fail
        let phi = |a: i64, b: i64, c: i64| {
            let z = |k: i64| P1::Fin(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 7.0));
            cross_ratio(P1::c(0.0, 0.0), z(a), z(b), z(c)).map(bw_dilog_p1).unwrap_or(0.0)
        };
        assert!(averaging_check(7, phi, 1e-9).is_err());
    }

    #[test]
    fn identity_reports_small() {
        let r = i11_alternation_identity(5).unwrap();
        assert!(r.delta2_vanishes);
        assert!(r.reduced_residual < 1e-9);
        assert!(r.literal_residual > 1e-3);
        let r = cross_ratio_average_identity(5).unwrap();
        assert!(r.delta2_vanishes);
        assert!(r.reduced_residual < 1e-9);
    }
}
