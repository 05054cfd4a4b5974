//! Gaussian integers: the scalar ring of the whole theory.
//!
//! A `Gauss<T>` is a complex number with integer real and imaginary parts.
//! The ring is closed under addition, subtraction, multiplication and
//! conjugation and no operation ever rounds. There is no general
//! multiplicative inverse; the only divisions in this crate are the exact
//! ones ([`Gauss::exact_div`], [`exact_div_int`]) which fail loudly if a
//! remainder appears, because a remainder always indicates a bug upstream.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeTuple;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CaError, Result};
use crate::scalar::IntScalar;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Gauss<T> {
    pub re: T,
    pub im: T,
}

impl<T: IntScalar> Gauss<T> {
    pub fn new(re: T, im: T) -> Self {
        Gauss { re, im }
    }

    /// Convenience constructor from machine integers.
    pub fn of(re: i64, im: i64) -> Self {
        Gauss {
            re: T::from_i64(re).expect("i64 embeds into the integer scalar"),
            im: T::from_i64(im).expect("i64 embeds into the integer scalar"),
        }
    }

    pub fn zero() -> Self {
        Gauss {
            re: T::zero(),
            im: T::zero(),
        }
    }

    pub fn one() -> Self {
        Gauss {
            re: T::one(),
            im: T::zero(),
        }
    }

    /// The imaginary unit i.
    pub fn i() -> Self {
        Gauss {
            re: T::zero(),
            im: T::one(),
        }
    }

    pub fn from_int(re: T) -> Self {
        Gauss { re, im: T::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Gauss {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// |z|^2 = re^2 + im^2, a plain integer.
    pub fn norm_sq(&self) -> T {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    /// Multiplication by i: (re, im) -> (-im, re).
    pub fn mul_i(&self) -> Self {
        Gauss {
            re: -self.im.clone(),
            im: self.re.clone(),
        }
    }

    /// Multiplication by -i: (re, im) -> (im, -re).
    pub fn mul_neg_i(&self) -> Self {
        Gauss {
            re: self.im.clone(),
            im: -self.re.clone(),
        }
    }

    pub fn scale(&self, k: &T) -> Self {
        Gauss {
            re: self.re.clone() * k.clone(),
            im: self.im.clone() * k.clone(),
        }
    }

    /// Exact division by another Gaussian integer. Errors if `self` is not a
    /// ring multiple of `d`.
    pub fn exact_div(&self, d: &Self) -> Result<Self> {
        let n = d.norm_sq();
        let num = self * &d.conj();
        Ok(Gauss {
            re: exact_div_int(&num.re, &n)?,
            im: exact_div_int(&num.im, &n)?,
        })
    }

    /// Exact componentwise division by a plain integer.
    pub fn exact_div_scalar(&self, d: &T) -> Result<Self> {
        Ok(Gauss {
            re: exact_div_int(&self.re, d)?,
            im: exact_div_int(&self.im, d)?,
        })
    }
}

/// Exact integer division; a nonzero remainder (or zero divisor) is an error.
pub fn exact_div_int<T: IntScalar>(n: &T, d: &T) -> Result<T> {
    if d.is_zero() {
        return Err(CaError::InexactDivision);
    }
    let (q, r) = n.div_rem(d);
    if r.is_zero() {
        Ok(q)
    } else {
        Err(CaError::InexactDivision)
    }
}

/// The integer variation of a polynomial: `[g(f + d) - g(f - d)] / (2 d)`.
///
/// For constant, linear and quadratic `g` this equals the continuum
/// derivative exactly, which is why the division is required to be exact.
pub fn integer_variation<T: IntScalar>(g: impl Fn(&T) -> T, f: &T, delta: &T) -> Result<T> {
    if delta.is_zero() {
        return Err(CaError::ZeroDelta);
    }
    let hi = g(&(f.clone() + delta.clone()));
    let lo = g(&(f.clone() - delta.clone()));
    let two_delta = delta.clone() + delta.clone();
    exact_div_int(&(hi - lo), &two_delta)
}

impl<T: IntScalar> Add for &Gauss<T> {
    type Output = Gauss<T>;
    fn add(self, rhs: &Gauss<T>) -> Gauss<T> {
        Gauss {
            re: self.re.clone() + rhs.re.clone(),
            im: self.im.clone() + rhs.im.clone(),
        }
    }
}

impl<T: IntScalar> Sub for &Gauss<T> {
    type Output = Gauss<T>;
    fn sub(self, rhs: &Gauss<T>) -> Gauss<T> {
        Gauss {
            re: self.re.clone() - rhs.re.clone(),
            im: self.im.clone() - rhs.im.clone(),
        }
    }
}

impl<T: IntScalar> Mul for &Gauss<T> {
    type Output = Gauss<T>;
    fn mul(self, rhs: &Gauss<T>) -> Gauss<T> {
        Gauss {
            re: self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone(),
            im: self.re.clone() * rhs.im.clone() + self.im.clone() * rhs.re.clone(),
        }
    }
}

impl<T: IntScalar> Neg for &Gauss<T> {
    type Output = Gauss<T>;
    fn neg(self) -> Gauss<T> {
        Gauss {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl<T: IntScalar> Add for Gauss<T> {
    type Output = Gauss<T>;
    fn add(self, rhs: Gauss<T>) -> Gauss<T> {
        &self + &rhs
    }
}

impl<T: IntScalar> Sub for Gauss<T> {
    type Output = Gauss<T>;
    fn sub(self, rhs: Gauss<T>) -> Gauss<T> {
        &self - &rhs
    }
}

impl<T: IntScalar> Mul for Gauss<T> {
    type Output = Gauss<T>;
    fn mul(self, rhs: Gauss<T>) -> Gauss<T> {
        &self * &rhs
    }
}

impl<T: IntScalar> Neg for Gauss<T> {
    type Output = Gauss<T>;
    fn neg(self) -> Gauss<T> {
        -&self
    }
}

impl<T: IntScalar> fmt::Display for Gauss<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_negative() {
            write!(f, "{}{}i", self.re, self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl<T: IntScalar> fmt::Debug for Gauss<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

// JSON wire format: a two-element array of decimal strings ["re", "im"].
// Strings, because values routinely exceed the 64-bit range.
impl<T: IntScalar> Serialize for Gauss<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut tup = serializer.serialize_tuple(2)?;
        tup.serialize_element(&self.re.to_string())?;
        tup.serialize_element(&self.im.to_string())?;
        tup.end()
    }
}

impl<'de, T: IntScalar> Deserialize<'de> for Gauss<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct PairVisitor<T>(std::marker::PhantomData<T>);

        impl<'de, T: IntScalar> Visitor<'de> for PairVisitor<T> {
            type Value = Gauss<T>;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a two-element array of decimal strings [\"re\", \"im\"]")
            }

            fn visit_seq<A: SeqAccess<'de>>(
                self,
                mut seq: A,
            ) -> std::result::Result<Gauss<T>, A::Error> {
                let re: String = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let im: String = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<serde_json::Value>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                let parse = |s: &String| {
                    T::from_str(s)
                        .map_err(|_| de::Error::custom(format!("invalid integer literal {s:?}")))
                };
                Ok(Gauss {
                    re: parse(&re)?,
                    im: parse(&im)?,
                })
            }
        }

        deserializer.deserialize_tuple(2, PairVisitor(std::marker::PhantomData))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type G = Gauss<i64>;

    #[test]
    fn product_examples() {
        // (1-i)^2 = -2i
        assert_eq!(&G::of(1, -1) * &G::of(1, -1), G::of(0, -2));
        // i^2 = -1
        assert_eq!(&G::of(0, 1) * &G::of(0, 1), G::of(-1, 0));
    }

    /// Schoolbook complex multiplication, written independently of `Mul`.
    fn schoolbook(a: (i64, i64), b: (i64, i64)) -> (i64, i64) {
        (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
    }

    #[test]
    fn product_matches_schoolbook_oracle() {
        let (re, im) = schoolbook((3, 2), (1, -4));
        assert_eq!((re, im), (11, -10));
        assert_eq!(&G::of(3, 2) * &G::of(1, -4), G::of(re, im));
    }

    #[test]
    fn ring_identities_hold_bit_exactly() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let g = |rng: &mut rand_chacha::ChaCha8Rng| {
                G::of(rng.gen_range(-50..=50), rng.gen_range(-50..=50))
            };
            let (a, b, c) = (g(&mut rng), g(&mut rng), g(&mut rng));
            assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
            assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
            assert_eq!(&a * &b, &b * &a);
        }
    }

    #[test]
    fn exact_division_checks_divisibility() {
        let z = &G::of(11, -10) * &G::of(2, 3);
        assert_eq!(z.exact_div(&G::of(2, 3)).unwrap(), G::of(11, -10));
        assert_eq!(
            G::of(1, 0).exact_div(&G::of(2, 0)),
            Err(CaError::InexactDivision)
        );
    }

    #[test]
    fn variation_of_square_is_double() {
        // [ (f+d)^2 - (f-d)^2 ] / 2d = 2f, for every nonzero d
        for f in [-3i64, 0, 5, 17] {
            for d in [1i64, 2, 5] {
                let v = integer_variation(|x| x * x, &f, &d).unwrap();
                assert_eq!(v, 2 * f);
            }
        }
        assert_eq!(
            integer_variation(|x: &i64| x * x, &4, &0),
            Err(CaError::ZeroDelta)
        );
    }

    #[test]
    fn json_round_trip_uses_string_pairs() {
        let z: Gauss<num_bigint::BigInt> = Gauss::new(
            "123456789012345678901234567890".parse().unwrap(),
            "-1".parse().unwrap(),
        );
        let text = serde_json::to_string(&z).unwrap();
        assert_eq!(text, r#"["123456789012345678901234567890","-1"]"#);
        let back: Gauss<num_bigint::BigInt> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, z);
    }
}
