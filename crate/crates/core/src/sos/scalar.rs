//! Exact arithmetic in `Q(√2, √5)` on the basis `1, √2, √5, √10`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Signed, Zero};

use crate::rational::{format_rational, ratio, to_f64, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ExtScalar {
    /// Coefficients of `1, √2, √5, √10`.
    pub c: [Rational; 4],
}

impl ExtScalar {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> ExtScalar {
        ExtScalar { c: [a, b, c, d] }
    }

    pub fn rational(r: Rational) -> ExtScalar {
        ExtScalar::new(r, Rational::zero(), Rational::zero(), Rational::zero())
    }

    pub fn int(n: i64) -> ExtScalar {
        ExtScalar::rational(ratio(n, 1))
    }

    pub fn frac(p: i64, q: i64) -> ExtScalar {
        ExtScalar::rational(ratio(p, q))
    }

    pub fn sqrt2() -> ExtScalar {
        let z = Rational::zero;
        ExtScalar::new(z(), Rational::one(), z(), z())
    }

    pub fn sqrt5() -> ExtScalar {
        let z = Rational::zero;
        ExtScalar::new(z(), z(), Rational::one(), z())
    }

    pub fn sqrt10() -> ExtScalar {
        let z = Rational::zero;
        ExtScalar::new(z(), z(), z(), Rational::one())
    }

    pub fn is_rational(&self) -> bool {
        self.c[1..].iter().all(Zero::is_zero)
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.c[0])
            + to_f64(&self.c[1]) * 2f64.sqrt()
            + to_f64(&self.c[2]) * 5f64.sqrt()
            + to_f64(&self.c[3]) * 10f64.sqrt()
    }

    /// Exact sign, writing the element as `u + v√5` with `u, v ∈ Q(√2)`.
    pub fn signum(&self) -> Ordering {
        let u = (&self.c[0], &self.c[1]);
        let v = (&self.c[2], &self.c[3]);
        let su = sign_q2(u.0, u.1);
        let sv = sign_q2(v.0, v.1);
        if su == sv || sv == Ordering::Equal {
            return su;
        }
        if su == Ordering::Equal {
            return sv;
        }
        // Opposite signs: compare u² with 5v² inside Q(√2).
        let (u2a, u2b) = square_q2(u.0, u.1);
        let (v2a, v2b) = square_q2(v.0, v.1);
        let five = ratio(5, 1);
        let diff = sign_q2(&(u2a - &five * v2a), &(u2b - five * v2b));
        match diff {
            Ordering::Equal => Ordering::Equal,
            Ordering::Greater => su,
            Ordering::Less => sv,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    /// Conjugate `√5 -> -√5`.
    fn conj5(&self) -> ExtScalar {
        let [a, b, c, d] = &self.c;
        ExtScalar::new(a.clone(), b.clone(), -c.clone(), -d.clone())
    }

    pub fn inverse(&self) -> Option<ExtScalar> {
        if self.is_zero() {
            return None;
        }
        // x·conj5(x) lies in Q(√2): p + q√2, inverted by its own conjugate.
        let conj = self.conj5();
        let n = self * &conj;
        let (p, q) = (&n.c[0], &n.c[1]);
        let norm = p * p - ratio(2, 1) * q * q;
        let n_inv = ExtScalar::new(p / &norm, -(q / &norm), Rational::zero(), Rational::zero());
        Some(&conj * &n_inv)
    }
}

fn sign_q2(p: &Rational, q: &Rational) -> Ordering {
    let sp = sign(p);
    let sq = sign(q);
    if sp == sq || sq == Ordering::Equal {
        return sp;
    }
    if sp == Ordering::Equal {
        return sq;
    }
    match (p * p).cmp(&(ratio(2, 1) * q * q)) {
        Ordering::Equal => Ordering::Equal,
        Ordering::Greater => sp,
        Ordering::Less => sq,
    }
}

fn square_q2(p: &Rational, q: &Rational) -> (Rational, Rational) {
    (p * p + ratio(2, 1) * q * q, ratio(2, 1) * p * q)
}

fn sign(r: &Rational) -> Ordering {
    if r.is_positive() {
        Ordering::Greater
    } else if r.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

impl PartialOrd for ExtScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl Zero for ExtScalar {
    fn zero() -> Self {
        ExtScalar::default()
    }

    fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }
}

impl One for ExtScalar {
    fn one() -> Self {
        ExtScalar::int(1)
    }
}

impl<'a> Add<&'a ExtScalar> for &'a ExtScalar {
    type Output = ExtScalar;
    fn add(self, o: &ExtScalar) -> ExtScalar {
        let mut out = self.clone();
        out += o;
        out
    }
}

impl<'a> Sub<&'a ExtScalar> for &'a ExtScalar {
    type Output = ExtScalar;
    fn sub(self, o: &ExtScalar) -> ExtScalar {
        let mut out = self.clone();
        out -= o;
        out
    }
}

impl<'a> Mul<&'a ExtScalar> for &'a ExtScalar {
    type Output = ExtScalar;
    fn mul(self, o: &ExtScalar) -> ExtScalar {
        let [a, b, c, d] = &self.c;
        let [e, f, g, h] = &o.c;
        let two = ratio(2, 1);
        let five = ratio(5, 1);
        let ten = ratio(10, 1);
        ExtScalar::new(
            a * e + &two * b * f + &five * c * g + ten * d * h,
            a * f + b * e + &five * c * h + five * d * g,
            a * g + c * e + &two * b * h + two * d * f,
            a * h + d * e + b * g + c * f,
        )
    }
}

impl<'a> Div<&'a ExtScalar> for &'a ExtScalar {
    type Output = ExtScalar;
    fn div(self, o: &ExtScalar) -> ExtScalar {
        self * &o.inverse().expect("division by zero in Q(√2, √5)")
    }
}

impl Neg for ExtScalar {
    type Output = ExtScalar;
    fn neg(self) -> ExtScalar {
        let [a, b, c, d] = self.c;
        ExtScalar::new(-a, -b, -c, -d)
    }
}

impl Neg for &ExtScalar {
    type Output = ExtScalar;
    fn neg(self) -> ExtScalar {
        -self.clone()
    }
}

impl AddAssign<&ExtScalar> for ExtScalar {
    fn add_assign(&mut self, o: &ExtScalar) {
        for (x, y) in self.c.iter_mut().zip(&o.c) {
            *x += y;
        }
    }
}

impl SubAssign<&ExtScalar> for ExtScalar {
    fn sub_assign(&mut self, o: &ExtScalar) {
        for (x, y) in self.c.iter_mut().zip(&o.c) {
            *x -= y;
        }
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for ExtScalar {
            type Output = ExtScalar;
            fn $m(self, o: ExtScalar) -> ExtScalar {
                (&self).$m(&o)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl fmt::Display for ExtScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["", "sqrt2", "sqrt5", "sqrt10"];
        let mut parts = Vec::new();
        for (coef, name) in self.c.iter().zip(names) {
            if coef.is_zero() {
                continue;
            }
            let text = match (name, coef.is_one()) {
                ("", _) => format_rational(coef),
                (_, true) => name.to_string(),
                _ if (-coef).is_one() => format!("-{name}"),
                _ => format!("{}*{name}", format_rational(coef)),
            };
            parts.push(text);
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        let mut out = parts[0].clone();
        for p in &parts[1..] {
            match p.strip_prefix('-') {
                Some(rest) => out.push_str(&format!(" - {rest}")),
                None => out.push_str(&format!(" + {p}")),
            }
        }
        write!(f, "{out}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_of_roots() {
        assert_eq!(ExtScalar::sqrt2() * ExtScalar::sqrt5(), ExtScalar::sqrt10());
        assert_eq!(ExtScalar::sqrt10() * ExtScalar::sqrt10(), ExtScalar::int(10));
        assert_eq!(ExtScalar::sqrt10() * ExtScalar::sqrt2(), ExtScalar::int(2) * ExtScalar::sqrt5());
    }

    #[test]
    fn inverse_and_sign() {
        let x = ExtScalar::int(3) + ExtScalar::sqrt5() - ExtScalar::sqrt10();
        let inv = x.inverse().unwrap();
        assert_eq!(&x * &inv, ExtScalar::int(1));
        assert!(ExtScalar::zero().inverse().is_none());
        // 2√10 ≈ 6.32 versus 19/3 ≈ 6.33.
        let d = ExtScalar::int(2) * ExtScalar::sqrt10() - ExtScalar::frac(19, 3);
        assert!(d.is_negative());
        let d = ExtScalar::int(2) * ExtScalar::sqrt10() - ExtScalar::frac(63, 10);
        assert!(d.is_positive());
        // √2 + √5 - √10 ≈ 0.4857
        let e = ExtScalar::sqrt2() + ExtScalar::sqrt5() - ExtScalar::sqrt10();
        assert!(e.is_positive());
        assert_eq!(ExtScalar::sqrt5() - ExtScalar::sqrt5(), ExtScalar::zero());
    }

    #[test]
    fn display() {
        let x = ExtScalar::frac(1, 2) - ExtScalar::frac(1, 12) * ExtScalar::sqrt10();
        assert_eq!(x.to_string(), "1/2 - 1/12*sqrt10");
        assert_eq!(ExtScalar::sqrt2().to_string(), "sqrt2");
        assert_eq!(ExtScalar::zero().to_string(), "0");
    }
}
