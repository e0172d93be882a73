//! Double-double arithmetic (about 106 bits) for roots of unity and long sums.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct DD {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DD {
    pub const ZERO: DD = DD { hi: 0.0, lo: 0.0 };
    pub const ONE: DD = DD { hi: 1.0, lo: 0.0 };
    pub const PI: DD = DD { hi: std::f64::consts::PI, lo: 1.224_646_799_147_353_2e-16 };

    pub fn new(x: f64) -> DD {
        DD { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn from_ratio(n: i64, d: i64) -> DD {
        DD::new(n as f64) / DD::new(d as f64)
    }

    pub fn abs(self) -> DD {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn mul_f64(self, b: f64) -> DD {
        let (p, e) = two_prod(self.hi, b);
        let (s, e2) = quick_two_sum(p, e + self.lo * b);
        DD { hi: s, lo: e2 }
    }

    pub fn sqrt(self) -> DD {
        if self.hi <= 0.0 {
            return DD::ZERO;
        }
        let x = self.hi.sqrt();
        let xd = DD::new(x);
        let r = self - xd * xd;
        xd + DD::new(r.to_f64() / (2.0 * x))
    }

    /// `(sin x, cos x)` by Taylor series after halving, then doubling back.
    pub fn sin_cos(self) -> (DD, DD) {
        const HALVINGS: i32 = 8;
        let two_pi = DD::PI.mul_f64(2.0);
        let k = (self.to_f64() / two_pi.to_f64()).round();
        let r = self - two_pi.mul_f64(k);
        let h = r.mul_f64(1.0 / (1u64 << HALVINGS) as f64);
        let h2 = h * h;
        // sin h
        let mut term = h;
        let mut s = h;
        let mut n = 1.0;
        loop {
            term = -(term * h2) / DD::new((n + 1.0) * (n + 2.0));
            n += 2.0;
            s = s + term;
            if term.hi.abs() < 1e-34 {
                break;
            }
        }
        let mut c = (DD::ONE - s * s).sqrt();
        let mut s = s;
        for _ in 0..HALVINGS {
            let ns = (s * c).mul_f64(2.0);
            let nc = c * c - s * s;
            s = ns;
            c = nc;
        }
        (s, c)
    }
}

impl Add for DD {
    type Output = DD;
    fn add(self, b: DD) -> DD {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (s, e) = quick_two_sum(s, e + f);
        DD { hi: s, lo: e }
    }
}

impl Neg for DD {
    type Output = DD;
    fn neg(self) -> DD {
        DD { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for DD {
    type Output = DD;
    fn sub(self, b: DD) -> DD {
        self + (-b)
    }
}

impl Mul for DD {
    type Output = DD;
    fn mul(self, b: DD) -> DD {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (s, e) = quick_two_sum(p, e);
        DD { hi: s, lo: e }
    }
}

impl Div for DD {
    type Output = DD;
    fn div(self, b: DD) -> DD {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (s, e) = quick_two_sum(q1, q2);
        DD { hi: s, lo: e } + DD::new(q3)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct DDComplex {
    pub re: DD,
    pub im: DD,
}

impl DDComplex {
    pub const ZERO: DDComplex = DDComplex { re: DD::ZERO, im: DD::ZERO };
    pub const ONE: DDComplex = DDComplex { re: DD::ONE, im: DD::ZERO };

    /// `exp(2πi·n/d)`.
    pub fn root_of_unity(n: i64, d: i64) -> DDComplex {
        let m = n.rem_euclid(d);
        // exact values on the axes
        if (4 * m) % d == 0 {
            let (re, im) = match 4 * m / d {
                0 => (1.0, 0.0),
                1 => (0.0, 1.0),
                2 => (-1.0, 0.0),
                _ => (0.0, -1.0),
            };
            return DDComplex { re: DD::new(re), im: DD::new(im) };
        }
        let theta = DD::PI.mul_f64(2.0) * DD::from_ratio(m, d);
        let (s, c) = theta.sin_cos();
        DDComplex { re: c, im: s }
    }

    pub fn scale(self, x: DD) -> DDComplex {
        DDComplex { re: self.re * x, im: self.im * x }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for DDComplex {
    type Output = DDComplex;
    fn add(self, b: DDComplex) -> DDComplex {
        DDComplex { re: self.re + b.re, im: self.im + b.im }
    }
}

impl Sub for DDComplex {
    type Output = DDComplex;
    fn sub(self, b: DDComplex) -> DDComplex {
        DDComplex { re: self.re - b.re, im: self.im - b.im }
    }
}

impl Mul for DDComplex {
    type Output = DDComplex;
    fn mul(self, b: DDComplex) -> DDComplex {
        DDComplex { re: self.re * b.re - self.im * b.im, im: self.re * b.im + self.im * b.re }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_sixth() {
        let (s, c) = (DD::PI / DD::new(6.0)).sin_cos();
        assert!((s - DD::new(0.5)).abs().to_f64() < 1e-30, "{:?}", s - DD::new(0.5));
        let c2 = c * c;
        assert!((c2 - DD::from_ratio(3, 4)).abs().to_f64() < 1e-28, "{:?}", c2 - DD::from_ratio(3, 4));
    }

    #[test]
    fn roots_of_unity_close() {
        for d in 1..30 {
            let z = DDComplex::root_of_unity(1, d);
            let mut acc = DDComplex::ONE;
            for _ in 0..d {
                acc = acc * z;
            }
            assert!((acc.re - DD::ONE).abs().to_f64() < 1e-28, "d={d}");
            assert!(acc.im.abs().to_f64() < 1e-28);
        }
    }

    #[test]
    fn division_roundtrip() {
        let a = DD::from_ratio(1, 3);
        let b = a * DD::new(3.0);
        assert!((b - DD::ONE).abs().to_f64() < 1e-31);
    }
}
