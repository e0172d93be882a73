//! Unit symbols, wedge squares, and the cyclotomic unit lattice C₁(N)⊗Q.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numberfields::{gcd, norm_to_q, CycloNum};
use crate::qlinalg::{q, FormalSum, Rational};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum UnitSymbol {
    /// Free-form field element label.
    Field(String),
    /// u(α) = 1 − ζ_N^α with α canonical in 1..=N/2.
    Cyclo(u64, u64),
    /// e(α) for a nonzero residue class modulo the unit image.
    Elliptic(u64),
    /// The formal symbol θ(0) adjoined in Ĉ₁.
    Zero,
}

impl fmt::Debug for UnitSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitSymbol::Field(s) => write!(f, "[{}]", s),
            UnitSymbol::Cyclo(_, a) => write!(f, "u{}", a),
            UnitSymbol::Elliptic(a) => write!(f, "e{}", a),
            UnitSymbol::Zero => write!(f, "θ0"),
        }
    }
}

impl UnitSymbol {
    /// u(α) at level N, with u(−α) = u(α) and u(0) the formal zero.
    pub fn cyclo(n: u64, alpha: i64) -> UnitSymbol {
        let a = alpha.rem_euclid(n as i64) as u64;
        if a == 0 {
            UnitSymbol::Zero
        } else {
            UnitSymbol::Cyclo(n, a.min(n - a))
        }
    }
}

pub type Wedge2<S> = FormalSum<(S, S)>;

/// u∧v in canonical order.
pub fn wedge<S: Ord + Clone>(u: &S, v: &S) -> Wedge2<S> {
    match u.cmp(v) {
        std::cmp::Ordering::Equal => FormalSum::zero(),
        std::cmp::Ordering::Less => FormalSum::single((u.clone(), v.clone())),
        std::cmp::Ordering::Greater => FormalSum::term((v.clone(), u.clone()), q(-1)),
    }
}

/// Bilinear extension of ∧ to formal sums.
pub fn wedge_sums<S: Ord + Clone>(x: &FormalSum<S>, y: &FormalSum<S>) -> Wedge2<S> {
    let mut out = FormalSum::zero();
    for (u, a) in x.iter() {
        for (v, b) in y.iter() {
            out.add_assign_scaled(&wedge(u, v), &(a * b));
        }
    }
    out
}

/// The Q-span of the cyclotomic units 1 − ζ_N^α modulo torsion, with a
/// chosen basis among the u(α).
#[derive(Debug)]
pub struct CycloUnits {
    pub level: u64,
    /// Basis exponents α, increasing.
    pub basis: Vec<u64>,
    /// Coordinates of each u(α), α in 1..=N/2.
    coords: BTreeMap<u64, FormalSum<UnitSymbol>>,
    cache: Mutex<HashMap<CycloNum, FormalSum<UnitSymbol>>>,
}

fn primes_dividing(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| n % p == 0 && (2..p).all(|d| p % d != 0)).collect()
}

fn valuation(x: &BigInt, p: u64) -> i64 {
    let mut v = 0;
    let mut m = x.clone();
    let bp = BigInt::from(p);
    while !m.is_zero() && (&m % &bp).is_zero() {
        m /= &bp;
        v += 1;
    }
    v
}

/// log|σ_j(x)| over embeddings modulo conjugation, followed by v_p(N(x))
/// for each prime p | N. Injective on the cyclotomic units modulo torsion.
fn lattice_vector(level: u64, x: &CycloNum) -> Vec<f64> {
    let n = level as i64;
    let mut v: Vec<f64> = (1..=n.max(2) / 2)
        .filter(|&j| gcd(j, n) == 1)
        .map(|j| x.embed(j).map(|z| z.norm().ln()).unwrap_or(f64::NAN))
        .collect();
    let nm = norm_to_q(x);
    for p in primes_dividing(level) {
        v.push((valuation(nm.numer(), p) - valuation(nm.denom(), p)) as f64);
    }
    v
}

fn norm_is_supported(level: u64, x: &CycloNum) -> bool {
    let nm = norm_to_q(x);
    let strip = |y: &BigInt| {
        let mut m = y.abs();
        for p in primes_dividing(level) {
            let bp = BigInt::from(p);
            while !m.is_zero() && (&m % &bp).is_zero() {
                m /= &bp;
            }
        }
        m.is_one()
    };
    strip(nm.numer()) && strip(nm.denom())
}

/// Least squares by normal equations; the systems here are tiny.
fn least_squares(cols: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let r = cols.len();
    let mut a = vec![vec![0.0; r + 1]; r];
    for i in 0..r {
        for j in 0..r {
            a[i][j] = cols[i].iter().zip(&cols[j]).map(|(x, y)| x * y).sum();
        }
        a[i][r] = cols[i].iter().zip(rhs).map(|(x, y)| x * y).sum();
    }
    for c in 0..r {
        let p = (c..r).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-300 {
            return None;
        }
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
    Some((0..r).map(|i| a[i][r] / a[i][i]).collect())
}

/// Independent subset of columns by Gram-Schmidt with a relative tolerance.
pub(crate) fn independent_columns(cols: &[Vec<f64>], tol: f64) -> Vec<usize> {
    let mut ortho: Vec<Vec<f64>> = Vec::new();
    let mut chosen = Vec::new();
    for (k, c) in cols.iter().enumerate() {
        let mut v = c.clone();
        for o in &ortho {
            let d: f64 = v.iter().zip(o).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(o) {
                *x -= d * y;
            }
        }
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nc = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nv > tol * nc.max(1.0) {
            ortho.push(v.iter().map(|x| x / nv).collect());
            chosen.push(k);
        }
    }
    chosen
}

fn rationalize(v: &[f64], max_den: i64) -> Option<Vec<Rational>> {
    for d in 1..=max_den {
        let ok = v.iter().all(|x| ((x * d as f64) - (x * d as f64).round()).abs() < 1e-7);
        if ok {
            return Some(v.iter().map(|x| Rational::new(BigInt::from((x * d as f64).round() as i64), BigInt::from(d))).collect());
        }
    }
    None
}

pub fn u_elem(level: u64, alpha: u64) -> CycloNum {
    CycloNum::one(level).sub(&CycloNum::zeta_pow(level, alpha as i64))
}

impl CycloUnits {
    fn build(level: u64) -> CycloUnits {
        let alphas: Vec<u64> = (1..=level / 2).collect();
        let cols: Vec<Vec<f64>> = alphas.iter().map(|&a| lattice_vector(level, &u_elem(level, a))).collect();
        let basis: Vec<u64> = independent_columns(&cols, 1e-9).into_iter().map(|i| alphas[i]).collect();
        let mut cu = CycloUnits { level, basis, coords: BTreeMap::new(), cache: Mutex::new(HashMap::new()) };
        for &a in &alphas {
            let c = cu.factor_uncached(&u_elem(level, a)).unwrap_or_else(|e| panic!("level {} alpha {}: {}", level, a, e));
            cu.coords.insert(a, c);
        }
        cu
    }

    /// Shared instance per level.
    pub fn get(level: u64) -> Arc<CycloUnits> {
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<CycloUnits>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(c) = cache.lock().unwrap().get(&level) {
            return c.clone();
        }
        let c = Arc::new(CycloUnits::build(level));
        cache.lock().unwrap().entry(level).or_insert(c).clone()
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_symbols(&self) -> Vec<UnitSymbol> {
        self.basis.iter().map(|&a| UnitSymbol::Cyclo(self.level, a)).collect()
    }

    /// Coordinates of u(α); u(0) is the formal zero symbol.
    pub fn u(&self, alpha: i64) -> FormalSum<UnitSymbol> {
        match UnitSymbol::cyclo(self.level, alpha) {
            UnitSymbol::Cyclo(_, a) => self.coords[&a].clone(),
            s => FormalSum::single(s),
        }
    }

    /// Coordinates of x ∈ Q(ζ_N)^* ⊗ Q, verified exactly: x^D equals
    /// ∏ u_b^{D·e_b} times a root of unity.
    pub fn factor(&self, x: &CycloNum) -> Result<FormalSum<UnitSymbol>> {
        if let Some(c) = self.cache.lock().unwrap().get(x) {
            return Ok(c.clone());
        }
        let c = self.factor_uncached(x)?;
        self.cache.lock().unwrap().insert(x.clone(), c.clone());
        Ok(c)
    }

    fn factor_uncached(&self, x: &CycloNum) -> Result<FormalSum<UnitSymbol>> {
        let n = self.level;
        if x.level() != n {
            return Err(Error::Input(format!("element of level {} in lattice of level {}", x.level(), n)));
        }
        if x.is_zero() {
            return Err(Error::Input("zero is not a unit".into()));
        }
        let dom = |msg: &str| Error::Input(format!("{:?} is not in the cyclotomic unit span: {}", x, msg));
        if !norm_is_supported(n, x) {
            return Err(dom("norm has primes not dividing the level"));
        }
        let cols: Vec<Vec<f64>> = self.basis.iter().map(|&a| lattice_vector(n, &u_elem(n, a))).collect();
        let rhs = lattice_vector(n, x);
        let e = if cols.is_empty() { vec![] } else { least_squares(&cols, &rhs).unwrap_or_default() };
        let fit: Vec<f64> = (0..rhs.len()).map(|i| cols.iter().zip(&e).map(|(c, w)| c[i] * w).sum::<f64>()).collect();
        let resid = rhs.iter().zip(&fit).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if resid > 1e-8 {
            return Err(dom("log residual"));
        }
        let er = rationalize(&e, 120).ok_or_else(|| dom("irrational exponents"))?;
        let d = er.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom())).to_u64().unwrap();
        let mut prod = x.pow(d);
        for (&a, r) in self.basis.iter().zip(&er) {
            let k = (r * Rational::from_integer(BigInt::from(d))).to_integer();
            if k.is_zero() {
                continue;
            }
            let p = u_elem(n, a).pow(k.abs().to_u64().unwrap());
            prod = if k.is_positive() { prod.mul(&p.inv()?) } else { prod.mul(&p) };
        }
        if prod.pow(2 * n) != CycloNum::one(n) {
            return Err(dom("exact verification failed"));
        }
        Ok(self.basis.iter().zip(er).map(|(&a, r)| (UnitSymbol::Cyclo(n, a), r)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfields::euler_phi;

    #[test]
    fn wedge_canonical() {
        let u = UnitSymbol::cyclo(7, 1);
        let v = UnitSymbol::cyclo(7, 2);
        assert!(wedge(&u, &v).add(&wedge(&v, &u)).is_zero());
        assert!(wedge(&u, &u).is_zero());
        assert_eq!(UnitSymbol::cyclo(7, 6), u);
        assert_eq!(UnitSymbol::cyclo(7, 0), UnitSymbol::Zero);
    }

    #[test]
    fn prime_level_basis_is_all_u() {
        for p in [3u64, 5, 7, 11, 13] {
            let c = CycloUnits::get(p);
            assert_eq!(c.basis, (1..=(p - 1) / 2).collect::<Vec<_>>());
        }
    }

    #[test]
    fn ranks_by_level() {
        // oracle: unit rank φ(N)/2 − 1 plus one generator per prime dividing N
        for n in 3..=16u64 {
            let omega = (2..=n).filter(|&p| n % p == 0 && (2..p).all(|d| p % d != 0)).count();
            let c = CycloUnits::get(n);
            assert_eq!(c.rank(), euler_phi(n) as usize / 2 - 1 + omega, "level {}", n);
        }
    }

    #[test]
    fn factor_simple() {
        let c = CycloUnits::get(7);
        let z = |k| CycloNum::zeta_pow(7, k);
        let one = CycloNum::one(7);
        // (1 − ζ³)/(1 − ζ) and its inverse
        let x = one.sub(&z(3)).mul(&one.sub(&z(1)).inv().unwrap());
        let f = c.factor(&x).unwrap();
        assert_eq!(f, c.u(3).sub(&c.u(1)));
        // ζ^k is torsion
        assert!(c.factor(&z(2)).unwrap().is_zero());
        // 1 − ζ^{-2} = −ζ^{-2}(1 − ζ²)
        assert_eq!(c.factor(&one.sub(&z(-2))).unwrap(), c.u(2));
        // 7 = ∏ (1 − ζ^k) = u1²u2²u3² up to a unit
        assert_eq!(
            c.factor(&CycloNum::from_rational(7, q(7))).unwrap(),
            c.u(1).add(&c.u(2)).add(&c.u(3)).scale(&q(2))
        );
    }

    #[test]
    fn composite_level_relations() {
        // 1 − ζ_6 is a root of unity
        let c = CycloUnits::get(6);
        assert!(c.u(1).is_zero());
        // 1 − ζ_4² = 2 = u(1)² up to torsion
        let c = CycloUnits::get(4);
        assert_eq!(c.u(2), c.u(1).scale(&q(2)));
    }

    #[test]
    fn non_units_rejected() {
        let c = CycloUnits::get(5);
        assert!(c.factor(&CycloNum::from_rational(5, q(3))).is_err());
        assert!(c.factor(&CycloNum::zero(5)).is_err());
    }
}
