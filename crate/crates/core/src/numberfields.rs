//! Cyclotomic fields, Gaussian and Eisenstein integers, prime ideals and
//! residue fields.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dd::{DDComplex, DD};
use crate::error::{input, Error, Result};
use crate::qlinalg::{q, Rational};

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn euler_phi(n: u64) -> u64 {
    let mut m = n;
    let mut out = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if m > 1 {
        out -= out / m;
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|p| p * p <= n).all(|p| n % p != 0)
}

pub fn modinv(a: i64, n: i64) -> Option<i64> {
    let e = a.rem_euclid(n).extended_gcd(&n);
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(n))
}

type Poly = Vec<BigInt>;

fn poly_trim(p: &mut Poly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

/// Exact division of integer polynomials by a monic divisor.
fn poly_div_monic(num: &Poly, den: &Poly) -> Poly {
    let mut r = num.clone();
    let dd = den.len() - 1;
    if r.len() <= dd {
        return vec![];
    }
    let mut quo = vec![BigInt::zero(); r.len() - dd];
    for i in (0..quo.len()).rev() {
        let c = r[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            r[i + j] -= &c * dj;
        }
        quo[i] = c;
    }
    quo
}

fn cyclotomic_poly_uncached(n: u64) -> Poly {
    let mut p: Poly = vec![BigInt::zero(); n as usize + 1];
    p[0] = -BigInt::one();
    p[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            p = poly_div_monic(&p, &cyclotomic_poly(d));
        }
    }
    poly_trim(&mut p);
    p
}

/// Integer coefficients of Φ_n, constant term first.
pub fn cyclotomic_poly(n: u64) -> Poly {
    static CACHE: OnceLock<Mutex<HashMap<u64, Poly>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    let p = cyclotomic_poly_uncached(n);
    cache.lock().unwrap().insert(n, p.clone());
    p
}

/// Element of Q(ζ_N) in the power basis 1, ζ, …, ζ^{φ(N)−1}.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycloNum {
    level: u64,
    coeffs: Vec<Rational>,
}

impl fmt::Debug for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| if i == 0 { c.to_string() } else { format!("{}*z{}^{}", c, self.level, i) })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

fn reduce_mod_phi(n: u64, mut v: Vec<Rational>) -> Vec<Rational> {
    let phi = cyclotomic_poly(n);
    let deg = phi.len() - 1;
    for i in (deg..v.len()).rev() {
        let c = std::mem::replace(&mut v[i], Rational::zero());
        if c.is_zero() {
            continue;
        }
        for j in 0..deg {
            v[i - deg + j] -= &c * Rational::from_integer(phi[j].clone());
        }
    }
    v.resize(deg, Rational::zero());
    v
}

impl CycloNum {
    pub fn zero(level: u64) -> CycloNum {
        CycloNum { level, coeffs: vec![Rational::zero(); euler_phi(level) as usize] }
    }

    pub fn from_rational(level: u64, c: Rational) -> CycloNum {
        let mut z = Self::zero(level);
        z.coeffs[0] = c;
        z
    }

    pub fn one(level: u64) -> CycloNum {
        Self::from_rational(level, q(1))
    }

    /// ζ_N^k.
    pub fn zeta_pow(level: u64, k: i64) -> CycloNum {
        let e = k.rem_euclid(level as i64) as usize;
        let mut v = vec![Rational::zero(); e + 1];
        v[e] = q(1);
        CycloNum { level, coeffs: reduce_mod_phi(level, v) }
    }

    /// Σ c_k ζ^k for arbitrary exponents.
    pub fn from_exponents(level: u64, terms: &[(i64, Rational)]) -> CycloNum {
        let mut v = vec![Rational::zero(); level as usize];
        for (k, c) in terms {
            v[k.rem_euclid(level as i64) as usize] += c;
        }
        CycloNum { level, coeffs: reduce_mod_phi(level, v) }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().skip(1).all(|c| c.is_zero())
    }

    fn check_level(&self, o: &CycloNum) -> Result<()> {
        if self.level != o.level {
            return input(format!("level mismatch: {} vs {}", self.level, o.level));
        }
        Ok(())
    }

    pub fn try_add(&self, o: &CycloNum) -> Result<CycloNum> {
        self.check_level(o)?;
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect();
        Ok(CycloNum { level: self.level, coeffs })
    }

    pub fn try_sub(&self, o: &CycloNum) -> Result<CycloNum> {
        self.try_add(&o.neg())
    }

    pub fn try_mul(&self, o: &CycloNum) -> Result<CycloNum> {
        self.check_level(o)?;
        let n = self.coeffs.len();
        let mut v = vec![Rational::zero(); (2 * n).max(1)];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    v[i + j] += a * b;
                }
            }
        }
        Ok(CycloNum { level: self.level, coeffs: reduce_mod_phi(self.level, v) })
    }

    pub fn add(&self, o: &CycloNum) -> CycloNum {
        self.try_add(o).expect("level mismatch")
    }

    pub fn sub(&self, o: &CycloNum) -> CycloNum {
        self.try_sub(o).expect("level mismatch")
    }

    pub fn mul(&self, o: &CycloNum) -> CycloNum {
        self.try_mul(o).expect("level mismatch")
    }

    pub fn neg(&self) -> CycloNum {
        CycloNum { level: self.level, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, c: &Rational) -> CycloNum {
        CycloNum { level: self.level, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn pow(&self, mut e: u64) -> CycloNum {
        let mut base = self.clone();
        let mut acc = CycloNum::one(self.level);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Inverse via the extended Euclidean algorithm in Q[x] against Φ_N.
    pub fn inv(&self) -> Result<CycloNum> {
        if self.is_zero() {
            return Err(Error::Arithmetic("inverse of zero".into()));
        }
        let phi: Vec<Rational> =
            cyclotomic_poly(self.level).into_iter().map(Rational::from_integer).collect();
        let (mut r0, mut r1) = (phi, self.coeffs.clone());
        let (mut s0, mut s1): (Vec<Rational>, Vec<Rational>) = (vec![], vec![q(1)]);
        qtrim(&mut r1);
        while r1.len() != 1 {
            let (quo, rem) = qdivmod(&r0, &r1);
            let s2 = qsub(&s0, &qmul(&quo, &s1));
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, s2);
            if r1.is_empty() {
                return Err(Error::Arithmetic("non-invertible element".into()));
            }
        }
        let c = r1[0].recip();
        let v: Vec<Rational> = s1.iter().map(|x| x * &c).collect();
        let mut v = v;
        v.resize(v.len().max(self.coeffs.len()), Rational::zero());
        Ok(CycloNum { level: self.level, coeffs: reduce_mod_phi(self.level, v) })
    }

    pub fn try_div(&self, o: &CycloNum) -> Result<CycloNum> {
        self.check_level(o)?;
        self.try_mul(&o.inv()?)
    }

    /// Image under Q(ζ_N) ⊂ Q(ζ_M), ζ_N ↦ ζ_M^{M/N}.
    pub fn lift(&self, m: u64) -> Result<CycloNum> {
        if m % self.level != 0 {
            return input(format!("cannot lift level {} to {}", self.level, m));
        }
        let f = (m / self.level) as i64;
        let terms: Vec<(i64, Rational)> =
            self.coeffs.iter().enumerate().map(|(i, c)| (i as i64 * f, c.clone())).collect();
        Ok(CycloNum::from_exponents(m, &terms))
    }

    /// Galois automorphism ζ ↦ ζ^k.
    pub fn galois(&self, k: i64) -> Result<CycloNum> {
        if gcd(k, self.level as i64) != 1 {
            return input(format!("gcd({}, {}) != 1", k, self.level));
        }
        let terms: Vec<(i64, Rational)> =
            self.coeffs.iter().enumerate().map(|(i, c)| (i as i64 * k, c.clone())).collect();
        Ok(CycloNum::from_exponents(self.level, &terms))
    }

    pub fn embed_dd(&self, k: i64) -> Result<DDComplex> {
        let n = self.level as i64;
        if gcd(k, n) != 1 {
            return input(format!("embedding index {} not coprime to level {}", k, n));
        }
        let mut acc = DDComplex::ZERO;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let z = DDComplex::root_of_unity(i as i64 * k, n);
            acc = acc + z.scale(rational_dd(c));
        }
        Ok(acc)
    }

    /// Complex embedding ζ_N ↦ exp(2πik/N).
    pub fn embed(&self, k: i64) -> Result<Complex64> {
        Ok(self.embed_dd(k)?.to_c64())
    }

    /// All complex embeddings, indexed by k coprime to N in increasing order.
    pub fn embeddings(&self) -> Vec<(i64, Complex64)> {
        let n = self.level as i64;
        (1..=n.max(1)).filter(|&k| gcd(k, n) == 1).map(|k| (k, self.embed(k).unwrap())).collect()
    }
}

pub fn rational_dd(c: &Rational) -> DD {
    let n = c.numer().to_f64().unwrap_or(f64::NAN);
    let d = c.denom().to_f64().unwrap_or(f64::NAN);
    if n.abs() < 9.0e15 && d < 9.0e15 {
        DD::new(n) / DD::new(d)
    } else {
        DD::new(n / d)
    }
}

fn qtrim(p: &mut Vec<Rational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn qsub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let mut v: Vec<Rational> = (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default())
        .collect();
    qtrim(&mut v);
    v
}

fn qmul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut v = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            v[i + j] += x * y;
        }
    }
    qtrim(&mut v);
    v
}

fn qdivmod(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut r = a.to_vec();
    qtrim(&mut r);
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut quo = vec![Rational::zero(); r.len() - db];
    let lead = b[db].recip();
    for i in (0..quo.len()).rev() {
        let c = &r[i + db] * &lead;
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i + j] -= &c * bj;
        }
        quo[i] = c;
    }
    qtrim(&mut r);
    qtrim(&mut quo);
    (quo, r)
}

/// a + b·t in Z[i] (d = 1, t = i) or Z[ρ] (d = 3, t = ρ = e^{πi/3}, ρ² = ρ − 1).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ImagQuadInt {
    pub d: u8,
    pub a: i64,
    pub b: i64,
}

impl fmt::Debug for ImagQuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for ImagQuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = if self.d == 1 { "i" } else { "ρ" };
        match (self.a, self.b) {
            (a, 0) => write!(f, "{}", a),
            (0, 1) => write!(f, "{}", t),
            (0, -1) => write!(f, "-{}", t),
            (0, b) => write!(f, "{}{}", b, t),
            (a, 1) => write!(f, "{}+{}", a, t),
            (a, -1) => write!(f, "{}-{}", a, t),
            (a, b) if b > 0 => write!(f, "{}+{}{}", a, b, t),
            (a, b) => write!(f, "{}{}{}", a, b, t),
        }
    }
}

impl ImagQuadInt {
    pub fn new(d: u8, a: i64, b: i64) -> ImagQuadInt {
        assert!(d == 1 || d == 3, "only d = 1, 3 supported");
        ImagQuadInt { d, a, b }
    }

    pub fn from_int(d: u8, a: i64) -> ImagQuadInt {
        Self::new(d, a, 0)
    }

    pub fn norm(&self) -> i64 {
        match self.d {
            1 => self.a * self.a + self.b * self.b,
            _ => self.a * self.a + self.a * self.b + self.b * self.b,
        }
    }

    pub fn conj(&self) -> ImagQuadInt {
        match self.d {
            1 => Self::new(1, self.a, -self.b),
            _ => Self::new(3, self.a + self.b, -self.b),
        }
    }

    pub fn add(&self, o: &ImagQuadInt) -> ImagQuadInt {
        Self::new(self.d, self.a + o.a, self.b + o.b)
    }

    pub fn sub(&self, o: &ImagQuadInt) -> ImagQuadInt {
        Self::new(self.d, self.a - o.a, self.b - o.b)
    }

    pub fn neg(&self) -> ImagQuadInt {
        Self::new(self.d, -self.a, -self.b)
    }

    pub fn mul(&self, o: &ImagQuadInt) -> ImagQuadInt {
        assert_eq!(self.d, o.d);
        let (a, b, c, e) = (self.a, self.b, o.a, o.b);
        match self.d {
            1 => Self::new(1, a * c - b * e, a * e + b * c),
            _ => Self::new(3, a * c - b * e, a * e + b * c + b * e),
        }
    }

    /// Exact quotient, if it exists in the ring.
    pub fn div_exact(&self, o: &ImagQuadInt) -> Option<ImagQuadInt> {
        let n = o.norm();
        if n == 0 {
            return None;
        }
        let p = self.mul(&o.conj());
        if p.a % n == 0 && p.b % n == 0 {
            Some(Self::new(self.d, p.a / n, p.b / n))
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn is_unit(&self) -> bool {
        self.norm() == 1
    }

    pub fn to_complex(&self) -> Complex64 {
        let t = match self.d {
            1 => Complex64::new(0.0, 1.0),
            _ => Complex64::new(0.5, 3f64.sqrt() / 2.0),
        };
        Complex64::new(self.a as f64, 0.0) + t * self.b as f64
    }

    /// The unit group O_K^*, in a fixed order.
    pub fn units(d: u8) -> Vec<ImagQuadInt> {
        match d {
            1 => vec![Self::new(1, 1, 0), Self::new(1, 0, 1), Self::new(1, -1, 0), Self::new(1, 0, -1)],
            _ => {
                let rho = Self::new(3, 0, 1);
                let mut out = vec![Self::new(3, 1, 0)];
                for _ in 1..6 {
                    let next = out.last().unwrap().mul(&rho);
                    out.push(next);
                }
                out
            }
        }
    }

    pub fn associates(&self) -> Vec<ImagQuadInt> {
        Self::units(self.d).iter().map(|u| self.mul(u)).collect()
    }

    /// Associate with the lexicographically largest (a, b).
    pub fn canonical_associate(&self) -> ImagQuadInt {
        self.associates().into_iter().max_by_key(|x| (x.a, x.b)).unwrap()
    }

    pub fn is_associate(&self, o: &ImagQuadInt) -> bool {
        self.associates().contains(o)
    }
}

/// Finite field F_q with q = p or p², elements encoded as x + p·y for x + y·t.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FiniteField {
    pub p: u64,
    pub degree: u32,
    /// t² = c0 + c1·t when degree = 2.
    pub c0: u64,
    pub c1: u64,
}

impl FiniteField {
    pub fn prime(p: u64) -> FiniteField {
        FiniteField { p, degree: 1, c0: 0, c1: 0 }
    }

    pub fn quadratic(p: u64, c0: i64, c1: i64) -> FiniteField {
        let pi = p as i64;
        FiniteField { p, degree: 2, c0: c0.rem_euclid(pi) as u64, c1: c1.rem_euclid(pi) as u64 }
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.degree)
    }

    fn split(&self, x: u64) -> (u64, u64) {
        (x % self.p, x / self.p)
    }

    fn join(&self, a: u64, b: u64) -> u64 {
        a % self.p + self.p * (b % self.p)
    }

    pub fn from_int(&self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }

    pub fn add(&self, x: u64, y: u64) -> u64 {
        let ((a, b), (c, d)) = (self.split(x), self.split(y));
        self.join(a + c, b + d)
    }

    pub fn neg(&self, x: u64) -> u64 {
        let (a, b) = self.split(x);
        self.join(self.p - a, self.p - b)
    }

    pub fn sub(&self, x: u64, y: u64) -> u64 {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: u64, y: u64) -> u64 {
        let p = self.p;
        let ((a, b), (c, d)) = (self.split(x), self.split(y));
        let bd = b * d % p;
        let re = a * c + bd * self.c0;
        let im = a * d + b * c + bd * self.c1;
        self.join(re % p, im % p)
    }

    pub fn pow(&self, x: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        let mut b = x;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, x: u64) -> Result<u64> {
        if x == 0 {
            return Err(Error::Arithmetic("inverse of zero in finite field".into()));
        }
        Ok(self.pow(x, self.order() - 2))
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.order()
    }

    pub fn units(&self) -> impl Iterator<Item = u64> {
        1..self.order()
    }

    pub fn mul_order(&self, x: u64) -> u64 {
        let mut k = 1;
        let mut y = x;
        while y != 1 {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    /// Smallest generator of F_q^*.
    pub fn generator(&self) -> u64 {
        self.units().find(|&x| self.mul_order(x) == self.order() - 1).unwrap()
    }

    pub fn label(&self, x: u64) -> String {
        if self.degree == 1 {
            x.to_string()
        } else {
            let (a, b) = self.split(x);
            format!("{}+{}t", a, b)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimeIdeal {
    pub d: u8,
    pub generator: ImagQuadInt,
    pub norm: u64,
    pub p: u64,
    pub kind: Splitting,
    pub field: FiniteField,
    /// Image of t in the residue field.
    t_image: u64,
}

impl PrimeIdeal {
    pub fn residue_map(&self, x: &ImagQuadInt) -> u64 {
        let f = &self.field;
        f.add(f.from_int(x.a), f.mul(f.from_int(x.b), self.t_image))
    }

    pub fn label(&self) -> String {
        format!("({})", self.generator)
    }

    /// Ideal containing a rational prime, of the given norm and (for split
    /// primes) the given conjugate index.
    pub fn from_generator(g: ImagQuadInt) -> Result<PrimeIdeal> {
        let n = g.norm() as u64;
        let d = g.d;
        if is_prime(n) {
            let p = n;
            let kind = if p % if d == 1 { 4 } else { 3 } == 1 { Splitting::Split } else { Splitting::Ramified };
            let pi = p as i64;
            let binv = modinv(g.b, pi).ok_or_else(|| Error::Input(format!("{} is not a valid prime generator", g)))?;
            let t = (-g.a * binv).rem_euclid(pi) as u64;
            let gen = g.canonical_associate();
            Ok(PrimeIdeal { d, generator: gen, norm: p, p, kind, field: FiniteField::prime(p), t_image: t })
        } else {
            let r = (n as f64).sqrt().round() as u64;
            if g.b != 0 || r * r != n || !is_prime(r) {
                return input(format!("{} does not generate a prime ideal", g));
            }
            let inert = match d {
                1 => r % 4 == 3,
                _ => r % 3 == 2,
            };
            if !inert {
                return input(format!("{} is not inert", r));
            }
            let field = if d == 1 { FiniteField::quadratic(r, -1, 0) } else { FiniteField::quadratic(r, -1, 1) };
            let gen = ImagQuadInt::from_int(d, r as i64);
            Ok(PrimeIdeal { d, generator: gen, norm: n, p: r, kind: Splitting::Inert, field, t_image: r })
        }
    }

    /// Looks up a prime by generator text such as `2+i`, `2-ρ`, `3`.
    pub fn parse(d: u8, s: &str) -> Result<PrimeIdeal> {
        let g = parse_quad(d, s)?;
        Self::from_generator(g)
    }
}

pub fn parse_quad(d: u8, s: &str) -> Result<ImagQuadInt> {
    let t = s.trim().trim_start_matches('(').trim_end_matches(')').replace(' ', "");
    let t = t.replace("rho", "ρ").replace('w', "ρ");
    let sym = if d == 1 { 'i' } else { 'ρ' };
    let bad = || Error::Input(format!("cannot parse '{}' as an element of the ring", s));
    if !t.contains(sym) {
        let a: i64 = t.parse().map_err(|_| bad())?;
        return Ok(ImagQuadInt::new(d, a, 0));
    }
    let body = t.trim_end_matches(sym);
    // split off the coefficient of the symbol
    let pos = body.char_indices().skip(1).filter(|(_, c)| *c == '+' || *c == '-').map(|(i, _)| i).last();
    let (a_str, b_str) = match pos {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let a: i64 = a_str.parse().map_err(|_| bad())?;
    let b: i64 = match b_str {
        "" | "+" => 1,
        "-" => -1,
        x => x.parse().map_err(|_| bad())?,
    };
    Ok(ImagQuadInt::new(d, a, b))
}

/// One canonical generator per prime ideal of norm ≤ bound, ordered by
/// norm and then by decreasing (a, b).
pub fn primes_up_to_norm(d: u8, bound: u64) -> Result<Vec<PrimeIdeal>> {
    if d != 1 && d != 3 {
        return input(format!("unsupported field d={}", d));
    }
    let mut out = Vec::new();
    for p in 2..=bound {
        if !is_prime(p) {
            continue;
        }
        let pi = p as i64;
        let mut found: Vec<ImagQuadInt> = Vec::new();
        let lim = (2.0 * (p as f64).sqrt()).ceil() as i64 + 1;
        for a in -lim..=lim {
            for b in -lim..=lim {
                let x = ImagQuadInt::new(d, a, b);
                if x.norm() == pi {
                    let c = x.canonical_associate();
                    if !found.contains(&c) {
                        found.push(c);
                    }
                }
            }
        }
        if found.is_empty() {
            if p * p <= bound {
                out.push(PrimeIdeal::from_generator(ImagQuadInt::from_int(d, pi))?);
            }
            continue;
        }
        found.sort_by_key(|x| std::cmp::Reverse((x.a, x.b)));
        for g in found {
            let pr = PrimeIdeal::from_generator(g)?;
            verify_residue_map(&pr)?;
            out.push(pr);
        }
    }
    out.sort_by_key(|pr| (pr.norm, std::cmp::Reverse((pr.generator.a, pr.generator.b))));
    Ok(out)
}

fn verify_residue_map(pr: &PrimeIdeal) -> Result<()> {
    let f = &pr.field;
    if pr.residue_map(&pr.generator) != 0 {
        return Err(Error::Arithmetic(format!("generator {} not in kernel", pr.generator)));
    }
    for a in -3..=3 {
        for b in -3..=3 {
            let x = ImagQuadInt::new(pr.d, a, b);
            let y = ImagQuadInt::new(pr.d, b - 1, a + 2);
            if pr.residue_map(&x.mul(&y)) != f.mul(pr.residue_map(&x), pr.residue_map(&y)) {
                return Err(Error::Arithmetic(format!("residue map at {} is not multiplicative", pr.label())));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitImage {
    pub prime: PrimeIdeal,
    /// Sorted residues of the units.
    pub mu: Vec<u64>,
    pub qprime: u64,
}

impl UnitImage {
    /// Canonical representative of x·μ: the smallest element of the coset.
    pub fn coset_rep(&self, x: u64) -> u64 {
        let f = &self.prime.field;
        self.mu.iter().map(|&u| f.mul(x, u)).min().unwrap()
    }

    /// Canonical representatives of F_q^*/μ in increasing order.
    pub fn coset_reps(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.prime.field.units().map(|x| self.coset_rep(x)).collect();
        v.sort();
        v.dedup();
        v
    }
}

pub fn residue_units(pr: &PrimeIdeal) -> UnitImage {
    let mut mu: Vec<u64> = ImagQuadInt::units(pr.d).iter().map(|u| pr.residue_map(u)).collect();
    mu.sort();
    mu.dedup();
    let qprime = (pr.norm - 1) / mu.len() as u64;
    UnitImage { prime: pr.clone(), mu, qprime }
}

/// Infinite-precision check helper for tests: the rational norm from Q(ζ_N) to Q.
pub fn norm_to_q(x: &CycloNum) -> Rational {
    let n = x.level() as i64;
    let mut acc = CycloNum::one(x.level());
    for k in 1..=n {
        if gcd(k, n) == 1 {
            acc = acc.mul(&x.galois(k).unwrap());
        }
    }
    debug_assert!(acc.is_rational());
    acc.coeffs[0].clone()
}

pub fn rational_to_f64(c: &Rational) -> f64 {
    rational_dd(c).to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::qf;
    use proptest::prelude::*;

    #[test]
    fn cyclotomic_polys() {
        let to_i = |p: Poly| p.iter().map(|c| c.to_i64().unwrap()).collect::<Vec<_>>();
        assert_eq!(to_i(cyclotomic_poly(1)), vec![-1, 1]);
        assert_eq!(to_i(cyclotomic_poly(4)), vec![1, 0, 1]);
        assert_eq!(to_i(cyclotomic_poly(6)), vec![1, -1, 1]);
        assert_eq!(to_i(cyclotomic_poly(12)), vec![1, 0, -1, 0, 1]);
        for n in 1..40u64 {
            assert_eq!(cyclotomic_poly(n).len() as u64 - 1, euler_phi(n));
        }
    }

    #[test]
    fn zeta4_squared() {
        let z = CycloNum::zeta_pow(4, 1);
        assert_eq!(z.mul(&z), CycloNum::from_rational(4, q(-1)));
    }

    #[test]
    fn inverse_of_zeta5() {
        assert_eq!(CycloNum::zeta_pow(5, 1).inv().unwrap(), CycloNum::zeta_pow(5, 4));
    }

    #[test]
    fn norm_of_one_minus_zeta3() {
        let one = CycloNum::one(3);
        let a = one.sub(&CycloNum::zeta_pow(3, 1));
        let b = one.sub(&CycloNum::zeta_pow(3, 2));
        assert_eq!(a.mul(&b), CycloNum::from_rational(3, q(3)));
        // oracle: |1 - e^{2πi/3}|^2 evaluated numerically
        let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        assert!(((Complex64::new(1.0, 0.0) - z).norm_sqr() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn arithmetic_errors() {
        assert!(matches!(CycloNum::zero(5).inv(), Err(Error::Arithmetic(_))));
        assert!(matches!(CycloNum::one(5).try_add(&CycloNum::one(7)), Err(Error::Input(_))));
    }

    #[test]
    fn embeddings() {
        let i = CycloNum::zeta_pow(4, 1).embed(1).unwrap();
        assert!((i - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((CycloNum::zeta_pow(5, 1).embed(2).unwrap().norm() - 1.0).abs() < 1e-15);
        let x = CycloNum::one(6).sub(&CycloNum::zeta_pow(6, 1)).embed(1).unwrap();
        let expect = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, std::f64::consts::PI / 3.0);
        assert!((x - expect).norm() < 1e-15);
        assert!((x - Complex64::new(0.5, -0.8660254037844386)).norm() < 1e-15);
        assert!(CycloNum::one(6).embed(2).is_err());
    }

    #[test]
    fn norms_of_cyclotomic_units() {
        // N(1 - ζ_p) = p, N(1 - ζ_n) = 1 for n not a prime power
        for p in [3u64, 5, 7, 11] {
            let x = CycloNum::one(p).sub(&CycloNum::zeta_pow(p, 1));
            assert_eq!(norm_to_q(&x), q(p as i64));
        }
        let x = CycloNum::one(6).sub(&CycloNum::zeta_pow(6, 1));
        assert_eq!(norm_to_q(&x), q(1));
    }

    #[test]
    fn gaussian_primes() {
        let ps = primes_up_to_norm(1, 5).unwrap();
        let gens: Vec<_> = ps.iter().map(|p| (p.generator, p.kind)).collect();
        assert_eq!(
            gens,
            vec![
                (ImagQuadInt::new(1, 1, 1), Splitting::Ramified),
                (ImagQuadInt::new(1, 2, 1), Splitting::Split),
                (ImagQuadInt::new(1, 2, -1), Splitting::Split),
            ]
        );
        let ps = primes_up_to_norm(1, 3).unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].norm, 2);
    }

    #[test]
    fn eisenstein_ramified_prime() {
        let ps = primes_up_to_norm(3, 3).unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].norm, 3);
        assert_eq!(ps[0].kind, Splitting::Ramified);
        // 2-ρ = 1-ρ² is associate to 1+ρ
        assert!(ps[0].generator.is_associate(&ImagQuadInt::new(3, 1, 1)));
        assert!(ImagQuadInt::new(3, 1, -1).is_unit());
    }

    #[test]
    fn primes_up_to_13() {
        let n1: Vec<u64> = primes_up_to_norm(1, 13).unwrap().iter().map(|p| p.norm).collect();
        assert_eq!(n1, vec![2, 5, 5, 9, 13, 13]);
        let n3: Vec<u64> = primes_up_to_norm(3, 13).unwrap().iter().map(|p| p.norm).collect();
        assert_eq!(n3, vec![3, 4, 7, 7, 13, 13]);
    }

    #[test]
    fn residue_unit_images() {
        let ps = primes_up_to_norm(1, 5).unwrap();
        let u = residue_units(&ps[0]);
        assert_eq!((u.prime.norm, u.mu.clone(), u.qprime), (2, vec![1], 1));
        let u = residue_units(&ps[1]);
        assert_eq!(ps[1].residue_map(&ImagQuadInt::new(1, 0, 1)), 3);
        assert_eq!((u.mu.clone(), u.qprime), (vec![1, 2, 3, 4], 1));
        let p3 = &primes_up_to_norm(3, 3).unwrap()[0];
        let u = residue_units(p3);
        assert_eq!((u.mu.clone(), u.qprime), (vec![1, 2], 1));
        assert_eq!(p3.residue_map(&ImagQuadInt::new(3, 0, 1)), 2);
    }

    #[test]
    fn qprime_values() {
        // oracle: (q-1)/gcd(q-1, |O^*|) since the unit image is cyclic of order dividing |O^*|
        for d in [1u8, 3] {
            let w = if d == 1 { 4 } else { 6 };
            for pr in primes_up_to_norm(d, 13).unwrap() {
                let u = residue_units(&pr);
                assert_eq!(u.qprime, (pr.norm - 1) / (pr.norm - 1).gcd(&w), "{}", pr.label());
            }
        }
    }

    #[test]
    fn parse_generators() {
        assert_eq!(parse_quad(1, "2+i").unwrap(), ImagQuadInt::new(1, 2, 1));
        assert_eq!(parse_quad(1, "(2-i)").unwrap(), ImagQuadInt::new(1, 2, -1));
        assert_eq!(parse_quad(3, "2-rho").unwrap(), ImagQuadInt::new(3, 2, -1));
        assert_eq!(parse_quad(1, "3").unwrap(), ImagQuadInt::new(1, 3, 0));
        assert_eq!(parse_quad(1, "-i").unwrap(), ImagQuadInt::new(1, 0, -1));
        assert!(parse_quad(1, "x").is_err());
    }

    #[test]
    fn inert_field_is_a_field() {
        for pr in primes_up_to_norm(1, 13).unwrap().into_iter().chain(primes_up_to_norm(3, 13).unwrap()) {
            let f = &pr.field;
            for x in f.units() {
                assert_eq!(f.mul(x, f.inv(x).unwrap()), 1, "{}", pr.label());
            }
        }
    }

    fn cyclo(level: u64) -> impl Strategy<Value = CycloNum> {
        proptest::collection::vec((-5i64..6, 1i64..4), euler_phi(level) as usize).prop_map(move |v| {
            let terms: Vec<(i64, Rational)> = v.iter().enumerate().map(|(i, &(n, d))| (i as i64, qf(n, d))).collect();
            CycloNum::from_exponents(level, &terms)
        })
    }

    proptest! {
        #[test]
        fn embed_is_multiplicative(x in cyclo(12), y in cyclo(12), k in prop::sample::select(vec![1i64, 5, 7, 11])) {
            let lhs = x.mul(&y).embed(k).unwrap();
            let rhs = x.embed(k).unwrap() * y.embed(k).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        }

        #[test]
        fn inverse_roundtrip(x in cyclo(7)) {
            prop_assume!(!x.is_zero());
            prop_assert_eq!(x.mul(&x.inv().unwrap()), CycloNum::one(7));
        }

        #[test]
        fn residue_map_is_homomorphism(a in -20i64..20, b in -20i64..20, c in -20i64..20, e in -20i64..20) {
            for d in [1u8, 3] {
                for pr in primes_up_to_norm(d, 13).unwrap() {
                    let x = ImagQuadInt::new(d, a, b);
                    let y = ImagQuadInt::new(d, c, e);
                    let f = &pr.field;
                    prop_assert_eq!(pr.residue_map(&x.mul(&y)), f.mul(pr.residue_map(&x), pr.residue_map(&y)));
                    prop_assert_eq!(pr.residue_map(&x.add(&y)), f.add(pr.residue_map(&x), pr.residue_map(&y)));
                }
            }
        }

        #[test]
        fn norm_is_multiplicative(a in -50i64..50, b in -50i64..50, c in -50i64..50, e in -50i64..50) {
            for d in [1u8, 3] {
                let x = ImagQuadInt::new(d, a, b);
                let y = ImagQuadInt::new(d, c, e);
                prop_assert_eq!(x.mul(&y).norm(), x.norm() * y.norm());
                prop_assert!((x.to_complex().norm_sqr() - x.norm() as f64).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn split_conjugates_non_associate() {
        for d in [1u8, 3] {
            let ps = primes_up_to_norm(d, 13).unwrap();
            for w in ps.windows(2) {
                if w[0].kind == Splitting::Split && w[0].norm == w[1].norm {
                    assert!(!w[0].generator.is_associate(&w[1].generator));
                    assert!(w[0].generator.conj().is_associate(&w[1].generator));
                }
            }
        }
    }
}
