//! Coefficient fields.
//!
//! The offline phase traces Gröbner computations over a word-sized prime
//! field `Z/p`; the online phase runs in `f64`. Both implement [`Scalar`],
//! which is all the polynomial and matrix code needs.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Largest prime below 2^30. Products of two residues fit in a `u64`.
pub const DEFAULT_PRIME: u64 = 1_073_741_789;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("rational {0} has a denominator that vanishes in the field")]
    BadDenominator(String),
}

/// Field element usable as a polynomial coefficient or matrix entry.
pub trait Scalar:
    Copy
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// True for exact fields, where `is_zero` is an equality test.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn inv(self) -> Result<Self, ArithError>;
    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &BigRational) -> Result<Self, ArithError>;
    /// Magnitude used for pivot selection. Exact fields return 0 or 1.
    fn magnitude(&self) -> f64;

    fn div(self, rhs: Self) -> Result<Self, ArithError> {
        Ok(self * rhs.inv()?)
    }

    /// A basis of the right null space of a full-row-rank matrix, or `None`
    /// when the rank is deficient. Exact fields use Gauss–Jordan with unit
    /// free columns.
    fn null_basis(m: &crate::linalg::Mat<Self>) -> Option<Vec<Vec<Self>>> {
        let cols = m.ncols();
        let rr = m.rref(1e-12);
        if rr.pivots.len() != m.nrows() {
            return None;
        }
        let free = (0..cols).filter(|c| !rr.pivots.contains(c));
        Some(
            free.map(|f| {
                let mut v = vec![Self::zero(); cols];
                v[f] = Self::one();
                for (r, &p) in rr.pivots.iter().enumerate() {
                    v[p] = -rr.matrix[(r, f)];
                }
                v
            })
            .collect(),
        )
    }
}

/// Residue class modulo the prime `P`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Zp<const P: u64>(u64);

/// The default offline field.
pub type Fp = Zp<DEFAULT_PRIME>;

impl<const P: u64> Zp<P> {
    pub const MODULUS: u64 = P;

    pub fn new(v: u64) -> Self {
        Zp(v % P)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Zp(1 % P);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Uniform draw from `{1, …, P−1}`.
    pub fn sample_nonzero<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Zp(rng.gen_range(1..P))
    }

    /// Deterministic uniform nonzero element for a given seed.
    pub fn rand_nonzero(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::sample_nonzero(&mut rng)
    }

    fn from_bigint(v: &BigInt) -> Self {
        let m = BigInt::from(P);
        let mut r = v % &m;
        if r.is_negative() {
            r += &m;
        }
        Zp(r.to_u64().expect("residue fits in u64"))
    }
}

impl<const P: u64> fmt::Debug for Zp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> fmt::Display for Zp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Print small negatives as negatives; easier to read in diagnostics.
        if self.0 > P / 2 {
            write!(f, "-{}", P - self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl<const P: u64> Add for Zp<P> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let s = self.0 + rhs.0;
        Zp(if s >= P { s - P } else { s })
    }
}

impl<const P: u64> Sub for Zp<P> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Zp(if self.0 >= rhs.0 {
            self.0 - rhs.0
        } else {
            self.0 + P - rhs.0
        })
    }
}

impl<const P: u64> Mul for Zp<P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if P <= 1 << 32 {
            Zp(self.0 * rhs.0 % P)
        } else {
            Zp(((self.0 as u128 * rhs.0 as u128) % P as u128) as u64)
        }
    }
}

impl<const P: u64> Neg for Zp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Zp(if self.0 == 0 { 0 } else { P - self.0 })
    }
}

impl<const P: u64> Scalar for Zp<P> {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zp(0)
    }
    fn one() -> Self {
        Zp(1 % P)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn inv(self) -> Result<Self, ArithError> {
        if self.0 == 0 {
            return Err(ArithError::DivisionByZero);
        }
        // Extended Euclid on signed integers.
        let (mut r0, mut r1) = (P as i128, self.0 as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1, "modulus is not prime");
        Ok(Zp(t0.rem_euclid(P as i128) as u64))
    }
    fn from_i64(v: i64) -> Self {
        Zp(v.rem_euclid(P as i64) as u64)
    }
    fn from_rational(r: &BigRational) -> Result<Self, ArithError> {
        let den = Self::from_bigint(r.denom());
        if den.is_zero() {
            return Err(ArithError::BadDenominator(r.to_string()));
        }
        Ok(Self::from_bigint(r.numer()) * den.inv()?)
    }
    fn magnitude(&self) -> f64 {
        if self.0 == 0 {
            0.0
        } else {
            1.0
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn inv(self) -> Result<Self, ArithError> {
        if self == 0.0 {
            Err(ArithError::DivisionByZero)
        } else {
            Ok(1.0 / self)
        }
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_rational(r: &BigRational) -> Result<Self, ArithError> {
        if r.denom().is_zero() {
            return Err(ArithError::BadDenominator(r.to_string()));
        }
        Ok(r.to_f64().unwrap_or(f64::NAN))
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }

    /// Orthonormal null vectors from an SVD; unit free columns can be badly
    /// scaled when the pivot block is nearly singular.
    fn null_basis(m: &crate::linalg::Mat<Self>) -> Option<Vec<Vec<Self>>> {
        let (rows, cols) = (m.nrows(), m.ncols());
        // Zero rows make the SVD square so that all right vectors come back.
        let sq = nalgebra::DMatrix::from_fn(cols.max(rows), cols, |i, j| if i < rows { m[(i, j)] } else { 0.0 });
        let svd = sq.svd(false, true);
        let vt = svd.v_t?;
        let sv = &svd.singular_values;
        let mut order: Vec<usize> = (0..sv.len()).collect();
        order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
        let top = sv[order[0]];
        if rows > cols || rows > 0 && sv[order[rows - 1]] <= 1e-12 * top {
            return None;
        }
        Some(order[rows..].iter().map(|&k| vt.row(k).iter().copied().collect()).collect())
    }
}

/// Deterministic trial-division primality test (fine for ~30-bit moduli).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u64;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Parses a decimal literal such as `-12`, `0.25` or `3e-2` into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let all = all / BigInt::from(10);
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(all);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -r } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;

    type Z7 = Zp<7>;
    type Z13 = Zp<13>;

    #[test]
    fn small_inverses() {
        assert_eq!(Z7::new(3).inv().unwrap(), Z7::new(5));
        assert_eq!(Z7::new(1).inv().unwrap(), Z7::new(1));
        assert_eq!(Z7::new(0).inv(), Err(ArithError::DivisionByZero));
    }

    #[test]
    fn default_prime_is_prime() {
        assert!(is_prime(DEFAULT_PRIME));
        assert!(DEFAULT_PRIME < 1 << 30);
        assert!(!(DEFAULT_PRIME + 1..1 << 30).any(is_prime));
    }

    #[test]
    fn field_axioms_exhaustive_z13() {
        let all: Vec<Z13> = (0..13).map(Z13::new).collect();
        for &a in &all {
            if !a.is_zero() {
                assert_eq!(a * a.inv().unwrap(), Z13::one());
            }
            for &b in &all {
                assert_eq!(a + b, b + a);
                assert_eq!(a * b, b * a);
                for &c in &all {
                    assert_eq!((a + b) + c, a + (b + c));
                    assert_eq!((a * b) * c, a * (b * c));
                    assert_eq!(a * (b + c), a * b + a * c);
                }
            }
        }
    }

    #[test]
    fn large_prime_inverse_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let a = Fp::sample_nonzero(&mut rng);
            assert_eq!(a * a.inv().unwrap(), Fp::one());
        }
    }

    #[test]
    fn rand_nonzero_is_deterministic_and_nonzero() {
        assert_eq!(Fp::rand_nonzero(42), Fp::rand_nonzero(42));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!((0..100_000).all(|_| !Fp::sample_nonzero(&mut rng).is_zero()));
    }

    #[test]
    fn rand_nonzero_chi_square_uniform() {
        // p = 101, 100 categories {1..100}; 10^5 draws.
        type Z101 = Zp<101>;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut counts = [0u64; 101];
        let n = 100_000;
        for _ in 0..n {
            counts[Z101::sample_nonzero(&mut rng).value() as usize] += 1;
        }
        assert_eq!(counts[0], 0);
        let expected = n as f64 / 100.0;
        let chi2: f64 = counts[1..]
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // Upper 0.001 quantile of chi-square with 99 degrees of freedom.
        assert!(chi2 < 148.23, "chi2 = {chi2}");
    }

    #[test]
    fn rationals_map_consistently() {
        let r = parse_rational("-0.25").unwrap();
        let v = Fp::from_rational(&r).unwrap();
        assert_eq!(v * Fp::from_i64(4), Fp::from_i64(-1));
        assert_eq!(f64::from_rational(&r).unwrap(), -0.25);
        assert_eq!(parse_rational("3e-2").unwrap(), parse_rational("0.03").unwrap());
        assert_eq!(parse_rational("7/2").unwrap(), parse_rational("3.5").unwrap());
        assert!(parse_rational("1.2.3").is_none());
        assert!(parse_rational("abc").is_none());
    }
}
