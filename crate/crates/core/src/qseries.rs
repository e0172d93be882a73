//! Truncated Laurent series in fractional powers of q over Q(ζ_M): Siegel
//! units, Δ^{1/12}, distribution relations and specialization at the cusp.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bloch::BlochElem;
use crate::error::{input, Error, Result};
use crate::numberfields::{cyclotomic_poly, euler_phi, CycloNum};
use crate::qlinalg::{q, qf, FormalSum, Rational};
use crate::units::{wedge_sums, CycloUnits, UnitSymbol, Wedge2};

pub const ROOT_OF_UNITY_TOL: f64 = 1e-10;

/// Σ c_e q^{e/D} with c_e ∈ Q(ζ_level), known for e < trunc.
#[derive(Clone, Debug, PartialEq)]
pub struct FracLaurentSeries {
    pub level: u64,
    pub scale: i64,
    pub trunc: i64,
    pub coeffs: BTreeMap<i64, CycloNum>,
}

/// Point ξ = α₁τ + α₂ of the Tate curve, α₁, α₂ ∈ [0,1).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TorsionCoord {
    pub a1: Rational,
    pub a2: Rational,
}

fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

impl TorsionCoord {
    pub fn new(a1: Rational, a2: Rational) -> Result<TorsionCoord> {
        let t = TorsionCoord { a1: frac(&a1), a2: frac(&a2) };
        if t.a1.is_zero() && t.a2.is_zero() {
            return input("torsion coordinate (0,0) has no Siegel unit");
        }
        Ok(t)
    }

    /// (a/N, b/N).
    pub fn of_level(n: u64, a: i64, b: i64) -> Result<TorsionCoord> {
        Self::new(qf(a, n as i64), qf(b, n as i64))
    }

    pub fn neg(&self) -> TorsionCoord {
        TorsionCoord { a1: frac(&-self.a1.clone()), a2: frac(&-self.a2.clone()) }
    }

    /// Smallest N with N·ξ ∈ Z².
    pub fn order(&self) -> u64 {
        self.a1.denom().lcm(self.a2.denom()).to_u64().unwrap_or(0)
    }

    pub fn label(&self) -> String {
        format!("({},{})", self.a1, self.a2)
    }
}

fn b2(x: &Rational) -> Rational {
    x * x - x + qf(1, 6)
}

fn to_int(x: &Rational, what: &str) -> Result<i64> {
    if !x.is_integer() {
        return Err(Error::Arithmetic(format!("{} = {} is not integral at this scale", what, x)));
    }
    x.to_integer().to_i64().ok_or_else(|| Error::Arithmetic(format!("{} overflows", what)))
}

/// Series with coefficients in the group ring Z[μ_M], reduced modulo Φ_M only when compared.
#[derive(Clone, Debug)]
struct GSeries {
    order: usize,
    scale: i64,
    trunc: i64,
    coeffs: BTreeMap<i64, Vec<i64>>,
}

impl GSeries {
    fn one(order: usize, scale: i64, width: i64) -> GSeries {
        let mut v = vec![0; order];
        v[0] = 1;
        GSeries { order, scale, trunc: width, coeffs: BTreeMap::from([(0, v)]) }
    }

    fn rot(&self, v: &[i64], k: i64) -> Vec<i64> {
        let m = self.order;
        let k = k.rem_euclid(m as i64) as usize;
        let mut out = vec![0; m];
        for (i, c) in v.iter().enumerate() {
            out[(i + k) % m] = *c;
        }
        out
    }

    /// Multiplication by ±ζ^k q^{e/D}.
    fn monomial(&mut self, k: i64, e: i64) {
        let old = std::mem::take(&mut self.coeffs);
        for (x, v) in old {
            self.coeffs.insert(x + e, self.rot(&v, k));
        }
        self.trunc += e;
    }

    /// Multiplication by (1 − ζ^k q^{e/D}), e ≥ 0.
    fn binomial(&mut self, k: i64, e: i64) {
        debug_assert!(e >= 0);
        let shifted: Vec<(i64, Vec<i64>)> = self
            .coeffs
            .iter()
            .filter(|(x, _)| **x + e < self.trunc)
            .map(|(x, v)| (x + e, self.rot(v, k)))
            .collect();
        for (x, v) in shifted {
            let dst = self.coeffs.entry(x).or_insert_with(|| vec![0; v.len()]);
            for (d, s) in dst.iter_mut().zip(&v) {
                *d -= s;
            }
        }
    }

    fn valuation(&self) -> Option<i64> {
        self.coeffs.iter().find(|(_, v)| v.iter().any(|c| *c != 0)).map(|(x, _)| *x)
    }

    fn width(&self) -> i64 {
        self.trunc - self.valuation().unwrap_or(self.trunc)
    }

    fn to_frac(&self) -> FracLaurentSeries {
        let level = self.order as u64;
        let mut coeffs = BTreeMap::new();
        for (x, v) in &self.coeffs {
            let r = reduce_int(level, v.iter().map(|c| *c as i128).collect());
            if r.iter().all(|c| *c == 0) {
                continue;
            }
            let terms: Vec<(i64, Rational)> =
                r.iter().enumerate().filter(|(_, c)| **c != 0).map(|(i, c)| (i as i64, Rational::from_integer(BigInt::from(*c)))).collect();
            coeffs.insert(*x, CycloNum::from_exponents(level, &terms));
        }
        FracLaurentSeries { level, scale: self.scale, trunc: self.trunc, coeffs }
    }
}

/// Reduction of an integer group-ring element modulo Φ_M.
fn reduce_int(level: u64, mut v: Vec<i128>) -> Vec<i128> {
    let phi: Vec<i128> = cyclotomic_poly(level).iter().map(|c| c.to_i128().expect("small cyclotomic coefficient")).collect();
    let deg = phi.len() - 1;
    for i in (deg..v.len()).rev() {
        let c = v[i];
        if c == 0 {
            continue;
        }
        v[i] = 0;
        for j in 0..deg {
            v[i - deg + j] -= c * phi[j];
        }
    }
    v.truncate(deg);
    v
}

fn group_mul(a: &[i64], b: &[i64]) -> Vec<i128> {
    let m = a.len();
    let mut out = vec![0i128; m];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if *y != 0 {
                out[(i + j) % m] += (*x as i128) * (*y as i128);
            }
        }
    }
    out
}

/// Multiplies `acc` by θ_Q(z) with modulus Q = q^m and z = Q^{β₁}e^{2πiβ₂}.
fn siegel_into(acc: &mut GSeries, t: &TorsionCoord, m: i64, width_q: i64) -> Result<()> {
    let big_m = Rational::from_integer(BigInt::from(acc.order as i64));
    let d = Rational::from_integer(BigInt::from(acc.scale));
    let mq = q(m);
    let (b1, b2v) = (&t.a1, &t.a2);
    // −1
    acc.monomial(acc.order as i64 / 2, 0);
    let e0 = to_int(&(&mq * b2(b1) / q(2) * &d), "leading exponent")?;
    let phase = to_int(&(&big_m * b2v * (b1 - q(1)) / q(2)), "phase")?;
    acc.monomial(phase, e0);
    let k = to_int(&(&big_m * b2v), "root of unity")?;
    acc.binomial(k, to_int(&(&mq * b1 * &d), "exponent")?);
    let width = width_q * acc.scale;
    let mut n = 1i64;
    loop {
        let lo = to_int(&(&mq * (q(n) - b1) * &d), "exponent")?;
        if lo >= width {
            break;
        }
        let hi = to_int(&(&mq * (q(n) + b1) * &d), "exponent")?;
        if hi < width {
            acc.binomial(k, hi);
        }
        acc.binomial(-k, lo);
        n += 1;
    }
    Ok(())
}

/// Multiplies `acc` by Δ(mτ)^{1/12}/2πi.
fn delta12_into(acc: &mut GSeries, m: i64, width_q: i64) -> Result<()> {
    let e0 = to_int(&(q(m) * q(acc.scale) / q(12)), "leading exponent")?;
    acc.monomial(0, e0);
    let mut n = 1;
    while m * n < width_q {
        acc.binomial(0, m * n * acc.scale);
        acc.binomial(0, m * n * acc.scale);
        n += 1;
    }
    Ok(())
}

fn default_scale(n: u64, m: u64) -> i64 {
    (12 * m * n * n) as i64
}

/// Siegel unit θ_q(z) at level N, expanded to `prec` whole powers of q past the leading term.
/// Coefficients live in Q(ζ_{2N²}) and exponents are scaled by 12N².
pub fn siegel_unit(a: &TorsionCoord, n: u64, prec: i64) -> Result<FracLaurentSeries> {
    if prec <= 0 {
        return input("prec must be positive");
    }
    if n % a.order() != 0 {
        return input(format!("{} is not {}-torsion", a.label(), n));
    }
    let mut acc = GSeries::one((2 * n * n) as usize, default_scale(n, 1), prec * default_scale(n, 1));
    siegel_into(&mut acc, a, 1, prec)?;
    Ok(acc.to_frac())
}

/// Δ(τ)^{1/12} divided by the formal 2πi marker.
pub fn delta12(n: u64, prec: i64) -> Result<FracLaurentSeries> {
    if prec <= 0 {
        return input("prec must be positive");
    }
    let mut acc = GSeries::one((2 * n * n).max(2) as usize, default_scale(n, 1), prec * default_scale(n, 1));
    delta12_into(&mut acc, 1, prec)?;
    Ok(acc.to_frac())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioReport {
    pub status: CheckStatus,
    pub valuation_match: bool,
    pub constant: bool,
    /// Relative width checked, in whole powers of q.
    pub orders_checked: f64,
    /// The ratio as a root of unity ±ζ_M^k, reported as (k, M).
    pub root_of_unity: Option<(i64, u64)>,
    pub max_abs_deviation: f64,
}

/// Tests whether f/g is a constant root of unity by cross-multiplication.
fn ratio_check(f: &GSeries, g: &GSeries) -> Result<RatioReport> {
    let level = f.order as u64;
    let (vf, vg) = match (f.valuation(), g.valuation()) {
        (Some(a), Some(b)) => (a, b),
        _ => return input("ratio of a zero series"),
    };
    let width = f.width().min(g.width());
    let orders = width as f64 / f.scale as f64;
    if vf != vg {
        return Ok(RatioReport { status: CheckStatus::Fail, valuation_match: false, constant: false, orders_checked: orders, root_of_unity: None, max_abs_deviation: f64::INFINITY });
    }
    let zero = vec![0; f.order];
    let f0 = &f.coeffs[&vf];
    let g0 = &g.coeffs[&vg];
    let mut constant = true;
    let offsets: std::collections::BTreeSet<i64> =
        f.coeffs.keys().map(|x| x - vf).chain(g.coeffs.keys().map(|x| x - vg)).filter(|r| *r > 0 && *r < width).collect();
    for r in offsets {
        let fr = f.coeffs.get(&(vf + r)).unwrap_or(&zero);
        let gr = g.coeffs.get(&(vg + r)).unwrap_or(&zero);
        let a = group_mul(fr, g0);
        let b = group_mul(f0, gr);
        let diff: Vec<i128> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        if reduce_int(level, diff).iter().any(|c| *c != 0) {
            constant = false;
            break;
        }
    }
    let cf = f.to_lead()?;
    let cg = g.to_lead()?;
    let c = cf.try_div(&cg)?;
    let mut dev: f64 = 0.0;
    for (_, z) in c.embeddings() {
        dev = dev.max((z.norm() - 1.0).abs());
    }
    let root = (0..level as i64).find(|&k| c == CycloNum::zeta_pow(level, k)).map(|k| (k, level));
    let status = if width <= 0 {
        CheckStatus::Inconclusive
    } else if constant && root.is_some() && dev < ROOT_OF_UNITY_TOL {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    Ok(RatioReport { status, valuation_match: true, constant, orders_checked: orders, root_of_unity: root, max_abs_deviation: dev })
}

impl GSeries {
    fn to_lead(&self) -> Result<CycloNum> {
        let v = self.valuation().ok_or_else(|| Error::Input("zero series".into()))?;
        let r = reduce_int(self.order as u64, self.coeffs[&v].iter().map(|c| *c as i128).collect());
        let terms: Vec<(i64, Rational)> = r.iter().enumerate().map(|(i, c)| (i as i64, Rational::from_integer(BigInt::from(*c)))).collect();
        Ok(CycloNum::from_exponents(self.order as u64, &terms))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DistributionReport {
    pub m: u64,
    pub level: u64,
    /// Target point on the quotient curve, or "0" for the kernel relation.
    pub target: String,
    pub ratio: RatioReport,
}

/// Distribution relation for the isogeny C*/q^{mZ} → C*/q^Z (identity on C*).
/// For t′ ≠ 0 compares ∏_{ψ(t)=t′} θ_{q^m}(t) with θ_q(t′); for t′ = 0 compares
/// ∏_{ψ(t)=0, t≠0} θ_{q^m}(t) with Δ(τ)^{1/12}/Δ(mτ)^{1/12}.
pub fn distribution_check(m: u64, n: u64, target: Option<&TorsionCoord>, prec: i64) -> Result<DistributionReport> {
    if m == 0 {
        return input("m must be positive");
    }
    if prec < 0 {
        return input("prec must be non-negative");
    }
    let order = (2 * m * n * n).max(2) as usize;
    let scale = default_scale(n, m);
    let w = prec.max(0) * scale;
    let mi = m as i64;
    let mut lhs = GSeries::one(order, scale, w);
    let mut rhs = GSeries::one(order, scale, w);
    match target {
        Some(t) => {
            if n % t.order() != 0 {
                return input(format!("{} is not {}-torsion", t.label(), n));
            }
            for k in 0..mi {
                let s = TorsionCoord::new((&t.a1 + q(k)) / q(mi), t.a2.clone())?;
                siegel_into(&mut lhs, &s, mi, prec)?;
            }
            siegel_into(&mut rhs, t, 1, prec)?;
        }
        None => {
            for k in 1..mi {
                siegel_into(&mut lhs, &TorsionCoord::new(qf(k, mi), q(0))?, mi, prec)?;
            }
            delta12_into(&mut lhs, mi, prec)?;
            delta12_into(&mut rhs, 1, prec)?;
        }
    }
    let mut ratio = ratio_check(&lhs, &rhs)?;
    if prec == 0 && ratio.status != CheckStatus::Fail {
        ratio.status = CheckStatus::Inconclusive;
    }
    Ok(DistributionReport { m, level: n, target: target.map(|t| t.label()).unwrap_or_else(|| "0".into()), ratio })
}

/// θ(−a)/θ(a) as a ratio report.
pub fn parity_check(a: &TorsionCoord, n: u64, prec: i64) -> Result<RatioReport> {
    let order = (2 * n * n) as usize;
    let scale = default_scale(n, 1);
    let mut f = GSeries::one(order, scale, prec * scale);
    let mut g = f.clone();
    siegel_into(&mut f, &a.neg(), 1, prec)?;
    siegel_into(&mut g, a, 1, prec)?;
    ratio_check(&f, &g)
}

impl FracLaurentSeries {
    pub fn one(level: u64, scale: i64, trunc: i64) -> FracLaurentSeries {
        FracLaurentSeries { level, scale, trunc, coeffs: BTreeMap::from([(0, CycloNum::one(level))]) }
    }

    pub fn constant(c: CycloNum, scale: i64, trunc: i64) -> FracLaurentSeries {
        let level = c.level();
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(0, c);
        }
        FracLaurentSeries { level, scale, trunc, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn leading(&self) -> Option<(i64, &CycloNum)> {
        self.coeffs.iter().next().map(|(e, c)| (*e, c))
    }

    fn compatible(&self, o: &FracLaurentSeries) -> Result<()> {
        if self.level != o.level || self.scale != o.scale {
            return input("series with different level or scale");
        }
        Ok(())
    }

    pub fn add(&self, o: &FracLaurentSeries) -> Result<FracLaurentSeries> {
        self.compatible(o)?;
        let trunc = self.trunc.min(o.trunc);
        let mut coeffs: BTreeMap<i64, CycloNum> = self.coeffs.iter().filter(|(e, _)| **e < trunc).map(|(e, c)| (*e, c.clone())).collect();
        for (e, c) in o.coeffs.iter().filter(|(e, _)| **e < trunc) {
            let s = match coeffs.get(e) {
                Some(x) => x.add(c),
                None => c.clone(),
            };
            if s.is_zero() {
                coeffs.remove(e);
            } else {
                coeffs.insert(*e, s);
            }
        }
        Ok(FracLaurentSeries { level: self.level, scale: self.scale, trunc, coeffs })
    }

    pub fn neg(&self) -> FracLaurentSeries {
        FracLaurentSeries { coeffs: self.coeffs.iter().map(|(e, c)| (*e, c.neg())).collect(), ..self.clone() }
    }

    pub fn sub(&self, o: &FracLaurentSeries) -> Result<FracLaurentSeries> {
        self.add(&o.neg())
    }

    /// Multiplication by c·q^{e/D}.
    pub fn shift(&self, c: &CycloNum, e: i64) -> FracLaurentSeries {
        FracLaurentSeries {
            level: self.level,
            scale: self.scale,
            trunc: self.trunc + e,
            coeffs: self.coeffs.iter().map(|(x, v)| (x + e, v.mul(c))).filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    pub fn mul(&self, o: &FracLaurentSeries) -> Result<FracLaurentSeries> {
        self.compatible(o)?;
        let (va, vb) = match (self.valuation(), o.valuation()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Ok(FracLaurentSeries { coeffs: BTreeMap::new(), trunc: self.trunc.min(o.trunc), ..self.clone() }),
        };
        let trunc = (self.trunc + vb).min(o.trunc + va);
        let mut coeffs: BTreeMap<i64, CycloNum> = BTreeMap::new();
        for (x, a) in &self.coeffs {
            for (y, b) in &o.coeffs {
                if x + y >= trunc {
                    break;
                }
                let p = a.mul(b);
                let e = coeffs.entry(x + y).or_insert_with(|| CycloNum::zero(self.level));
                *e = e.add(&p);
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(FracLaurentSeries { level: self.level, scale: self.scale, trunc, coeffs })
    }

    pub fn inv(&self) -> Result<FracLaurentSeries> {
        let (v, c0) = self.leading().ok_or_else(|| Error::Arithmetic("inverse of zero series".into()))?;
        let c0inv = c0.inv()?;
        let width = self.trunc - v;
        // normalized u = s/(c0 q^v) = 1 + r; 1/u by recursion on exponents
        let u: BTreeMap<i64, CycloNum> = self.coeffs.iter().map(|(e, c)| (e - v, c.mul(&c0inv))).collect();
        let mut out: BTreeMap<i64, CycloNum> = BTreeMap::from([(0, CycloNum::one(self.level))]);
        let exps: Vec<i64> = {
            // exponents reachable as sums of exponents of u below width
            let base: Vec<i64> = u.keys().copied().filter(|e| *e > 0).collect();
            let mut set = std::collections::BTreeSet::from([0i64]);
            let mut frontier = vec![0i64];
            while let Some(x) = frontier.pop() {
                for b in &base {
                    let y = x + b;
                    if y < width && set.insert(y) {
                        frontier.push(y);
                    }
                }
            }
            set.into_iter().collect()
        };
        for &e in exps.iter().skip(1) {
            let mut acc = CycloNum::zero(self.level);
            for (k, uk) in u.range(1..=e) {
                if let Some(w) = out.get(&(e - k)) {
                    acc = acc.sub(&uk.mul(w));
                }
            }
            if !acc.is_zero() {
                out.insert(e, acc);
            }
        }
        let inv = FracLaurentSeries { level: self.level, scale: self.scale, trunc: width, coeffs: out };
        Ok(inv.shift(&c0inv, -v))
    }

    pub fn to_json(&self) -> Value {
        let coeffs: Vec<Value> = self
            .coeffs
            .iter()
            .map(|(e, c)| json!([e, c.coeffs().iter().map(|x| x.to_string()).collect::<Vec<_>>()]))
            .collect();
        json!({"level": self.level, "scale": self.scale, "trunc": self.trunc, "coeffs": coeffs})
    }

    pub fn from_json(v: &Value) -> Result<FracLaurentSeries> {
        let bad = || Error::Input("malformed series JSON".into());
        let level = v["level"].as_u64().ok_or_else(bad)?;
        let scale = v["scale"].as_i64().ok_or_else(bad)?;
        let trunc = v["trunc"].as_i64().ok_or_else(bad)?;
        let deg = euler_phi(level) as usize;
        let mut coeffs = BTreeMap::new();
        for item in v["coeffs"].as_array().ok_or_else(bad)? {
            let e = item[0].as_i64().ok_or_else(bad)?;
            let cs = item[1].as_array().ok_or_else(bad)?;
            if cs.len() != deg {
                return Err(bad());
            }
            let mut terms = Vec::new();
            for (i, c) in cs.iter().enumerate() {
                let r: Rational = c.as_str().ok_or_else(bad)?.parse().map_err(|_| bad())?;
                terms.push((i as i64, r));
            }
            coeffs.insert(e, CycloNum::from_exponents(level, &terms));
        }
        Ok(FracLaurentSeries { level, scale, trunc, coeffs })
    }
}

/// Value of s/q^{v(s)} at q = 0.
pub fn sp_cusp(s: &FracLaurentSeries) -> Result<CycloNum> {
    s.leading().map(|(_, c)| c.clone()).ok_or_else(|| Error::Input("sp_cusp of the zero series".into()))
}

/// Unit symbol w(a₁/N, a₂/N) on Y₁(N).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModularSymbol {
    pub level: u64,
    pub a1: i64,
    pub a2: i64,
}

impl ModularSymbol {
    pub fn new(level: u64, a1: i64, a2: i64) -> ModularSymbol {
        let n = level as i64;
        ModularSymbol { level, a1: a1.rem_euclid(n), a2: a2.rem_euclid(n) }
    }
}

/// w(0, α) ↦ u(α); symbols with α₁ ≠ 0 specialize to torsion.
pub fn sp_symbol(w: &ModularSymbol) -> FormalSum<UnitSymbol> {
    if w.a1 == 0 {
        CycloUnits::get(w.level).u(w.a2)
    } else {
        FormalSum::zero()
    }
}

pub fn sp_wedge(x: &Wedge2<ModularSymbol>) -> Wedge2<UnitSymbol> {
    let mut out = FormalSum::zero();
    for ((a, b), c) in x.iter() {
        out.add_assign_scaled(&wedge_sums(&sp_symbol(a), &sp_symbol(b)), c);
    }
    out
}

/// {f}₂ ↦ {sp f}₂ if v(f) = 0, and 0 otherwise.
pub fn sp_bloch(terms: &[(FracLaurentSeries, Rational)]) -> Result<BlochElem> {
    let mut b = BlochElem::new();
    for (f, c) in terms {
        match f.leading() {
            None => return input("sp_bloch of the zero series"),
            Some((0, lead)) => b.insert(Some(lead.clone()), c.clone()),
            Some(_) => {}
        }
    }
    Ok(b)
}

/// One instance of the specialization square: sp((1−f)∧f) against δ₂(sp_bloch{f}).
/// `None` when a leading coefficient is not a cyclotomic unit.
pub fn commute_check(f: &FracLaurentSeries, lattice: &CycloUnits) -> Result<Option<bool>> {
    let one = FracLaurentSeries::one(f.level, f.scale, f.trunc.max(1));
    let g = one.sub(f)?;
    let (Ok(a), Ok(b)) = (lattice.factor(&sp_cusp(&g)?), lattice.factor(&sp_cusp(f)?)) else {
        return Ok(None);
    };
    let lhs = wedge_sums(&a, &b);
    let rhs = match crate::bloch::delta2(&sp_bloch(&[(f.clone(), q(1))])?, lattice) {
        Ok(r) => r,
        Err(_) => return Ok(None),
    };
    Ok(Some(lhs == rhs))
}

/// Normalized quotient e^{πi(a−b)/N}·θ(0,a/N)/θ(0,b/N) with leading term (1−ζ^a)/(1−ζ^b).
pub fn siegel_quotient(n: u64, a: i64, b: i64, prec: i64) -> Result<FracLaurentSeries> {
    let fa = siegel_unit(&TorsionCoord::of_level(n, 0, a)?, n, prec)?;
    let fb = siegel_unit(&TorsionCoord::of_level(n, 0, b)?, n, prec)?;
    let r = fa.mul(&fb.inv()?)?;
    let lead = sp_cusp(&r)?;
    let na = (a.rem_euclid(n as i64)) as u64;
    let nb = (b.rem_euclid(n as i64)) as u64;
    let m = r.level;
    let target = CycloNum::one(m)
        .sub(&CycloNum::zeta_pow(m, (na * m / n) as i64))
        .mul(&CycloNum::one(m).sub(&CycloNum::zeta_pow(m, (nb * m / n) as i64)).inv()?);
    let c = target.mul(&lead.inv()?);
    Ok(r.shift(&c, 0))
}

/// Checks sp_cusp(θ(0,a/N)) = (1−ζ_N^a) up to a root of unity for every a ≠ 0; returns failures.
pub fn sp_cusp_check(n: u64, prec: i64) -> Result<usize> {
    let m = 2 * n * n;
    let mut bad = 0;
    for a in 1..n as i64 {
        let lead = sp_cusp(&siegel_unit(&TorsionCoord::of_level(n, 0, a)?, n, prec)?)?;
        let expect = CycloNum::one(m).sub(&CycloNum::zeta_pow(m, a * (m / n) as i64));
        let c = lead.try_div(&expect)?;
        if !(0..m as i64).any(|k| c == CycloNum::zeta_pow(m, k)) {
            bad += 1;
        }
    }
    Ok(bad)
}

/// Smallest k > 0 with c^k = 1, if any up to `bound`.
pub fn root_order(c: &CycloNum, bound: u64) -> Option<u64> {
    let one = CycloNum::one(c.level());
    let mut p = c.clone();
    for k in 1..=bound {
        if p == one {
            return Some(k);
        }
        p = p.mul(c);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lead_exp(s: &FracLaurentSeries) -> i64 {
        s.valuation().unwrap()
    }

    #[test]
    fn leading_exponents() {
        let s = siegel_unit(&TorsionCoord::of_level(2, 0, 1).unwrap(), 2, 3).unwrap();
        assert_eq!(lead_exp(&s), s.scale / 12);
        let s = siegel_unit(&TorsionCoord::of_level(2, 1, 0).unwrap(), 2, 3).unwrap();
        assert_eq!(lead_exp(&s), -s.scale / 24);
        assert!(TorsionCoord::of_level(5, 0, 0).is_err());
        assert!(TorsionCoord::of_level(5, 5, 10).is_err());
    }

    #[test]
    fn cusp_value_is_cyclotomic_unit() {
        let s = siegel_unit(&TorsionCoord::of_level(5, 0, 1).unwrap(), 5, 4).unwrap();
        let lead = sp_cusp(&s).unwrap();
        let m = 50;
        let c = lead.try_div(&CycloNum::one(m).sub(&CycloNum::zeta_pow(m, 10))).unwrap();
        assert!(root_order(&c, 100).is_some());
        assert_eq!(sp_cusp_check(5, 3).unwrap(), 0);
    }

    #[test]
    fn delta12_coefficients() {
        let d = delta12(1, 3).unwrap();
        let s = d.scale;
        // q^{1/12}(1 − 2q − q² + …)
        assert_eq!(d.coeffs[&(s / 12)], CycloNum::one(d.level));
        assert_eq!(d.coeffs[&(s / 12 + s)], CycloNum::from_rational(d.level, q(-2)));
        assert_eq!(d.coeffs[&(s / 12 + 2 * s)], CycloNum::from_rational(d.level, q(-1)));
        let d1 = delta12(1, 1).unwrap();
        assert_eq!(d1.coeffs.len(), 1);
    }

    #[test]
    fn distribution_small() {
        let t = TorsionCoord::of_level(5, 0, 1).unwrap();
        let r = distribution_check(2, 5, Some(&t), 12).unwrap();
        assert_eq!(r.ratio.status, CheckStatus::Pass, "{:?}", r);
        let r = distribution_check(2, 5, None, 12).unwrap();
        assert_eq!(r.ratio.status, CheckStatus::Pass, "{:?}", r);
        let r = distribution_check(1, 5, Some(&t), 12).unwrap();
        assert_eq!(r.ratio.root_of_unity, Some((0, 50)));
        let r = distribution_check(2, 5, Some(&t), 0).unwrap();
        assert_eq!(r.ratio.status, CheckStatus::Inconclusive);
    }

    #[test]
    fn distribution_detects_wrong_target() {
        // compare against a point that is not the image
        let order = 100;
        let scale = default_scale(5, 2);
        let mut lhs = GSeries::one(order, scale, 8 * scale);
        let mut rhs = lhs.clone();
        for k in 0..2 {
            let s = TorsionCoord::new((qf(0, 5) + q(k)) / q(2), qf(1, 5)).unwrap();
            siegel_into(&mut lhs, &s, 2, 8).unwrap();
        }
        siegel_into(&mut rhs, &TorsionCoord::of_level(5, 0, 2).unwrap(), 1, 8).unwrap();
        assert_eq!(ratio_check(&lhs, &rhs).unwrap().status, CheckStatus::Fail);
    }

    #[test]
    fn parity() {
        for (a, b) in [(0, 1), (1, 2), (2, 0), (3, 4)] {
            let r = parity_check(&TorsionCoord::of_level(5, a, b).unwrap(), 5, 8).unwrap();
            assert_eq!(r.status, CheckStatus::Pass, "{a},{b}: {r:?}");
        }
    }

    #[test]
    fn series_arith_and_json() {
        let s = siegel_unit(&TorsionCoord::of_level(3, 1, 1).unwrap(), 3, 3).unwrap();
        let p = s.mul(&s.inv().unwrap()).unwrap();
        assert_eq!(p.coeffs.len(), 1);
        assert_eq!(sp_cusp(&p).unwrap(), CycloNum::one(p.level));
        let back = FracLaurentSeries::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        // multiplicativity of sp
        let t = siegel_unit(&TorsionCoord::of_level(3, 0, 1).unwrap(), 3, 3).unwrap();
        assert_eq!(sp_cusp(&s.mul(&t).unwrap()).unwrap(), sp_cusp(&s).unwrap().mul(&sp_cusp(&t).unwrap()));
    }

    #[test]
    fn sp_symbols() {
        let w = crate::units::wedge(&ModularSymbol::new(5, 1, 0), &ModularSymbol::new(5, 0, 1));
        assert!(sp_wedge(&w).is_zero());
        let w = crate::units::wedge(&ModularSymbol::new(5, 0, 1), &ModularSymbol::new(5, 0, 2));
        assert!(!sp_wedge(&w).is_zero());
        let f = siegel_unit(&TorsionCoord::of_level(3, 1, 0).unwrap(), 3, 2).unwrap();
        assert!(sp_bloch(&[(f, q(1))]).unwrap().terms.is_zero());
    }

    #[test]
    fn commute_square() {
        for (n, a, b) in [(3, 1, 2), (5, 1, 2)] {
            let f = siegel_quotient(n, a, b, 2).unwrap();
            let lattice = CycloUnits::get(f.level);
            assert_eq!(commute_check(&f, &lattice).unwrap(), Some(true));
            let g = f.shift(&CycloNum::one(f.level), f.scale);
            assert_eq!(commute_check(&g, &lattice).unwrap(), Some(true));
            let h = f.shift(&CycloNum::one(f.level), -f.scale);
            assert_eq!(commute_check(&h, &lattice).unwrap(), Some(true));
        }
    }
}
