use std::cmp::Ordering;
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Arbitrary-precision binary float: `sign * mag * 2^exp`.
///
/// `mag` is normalized to at most `prec` significant bits after every
/// operation. `prec` is per-value; binary operations work at the larger of
/// the two operand precisions.
#[derive(Clone, Debug)]
pub struct BigFloat {
    sign: i8,
    mag: BigUint,
    exp: i64,
    prec: u32,
}

impl BigFloat {
    pub fn zero(prec: u32) -> Self {
        BigFloat { sign: 0, mag: BigUint::zero(), exp: 0, prec }
    }

    pub fn one(prec: u32) -> Self {
        BigFloat::from_u64(1, prec)
    }

    pub fn from_u64(v: u64, prec: u32) -> Self {
        if v == 0 {
            return Self::zero(prec);
        }
        let mut f = BigFloat { sign: 1, mag: BigUint::from(v), exp: 0, prec };
        f.normalize();
        f
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        let mut f = Self::from_u64(v.unsigned_abs(), prec);
        if v < 0 {
            f.sign = -f.sign;
        }
        f
    }

    /// Exact conversion: every finite f64 is a dyadic rational.
    pub fn from_f64(v: f64, prec: u32) -> Self {
        assert!(v.is_finite(), "cannot convert non-finite f64");
        if v == 0.0 {
            return Self::zero(prec);
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1i8 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if raw_exp == 0 {
            (frac, -1074i64) // subnormal
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        let mut f = BigFloat { sign, mag: BigUint::from(mant), exp, prec };
        f.normalize();
        f
    }

    /// Parse a decimal string `[-]ddd[.ddd][e±n]`.
    pub fn from_decimal_str(s: &str, prec: u32) -> Option<Self> {
        let s = s.trim();
        let (sign, rest) = match s.strip_prefix('-') {
            Some(r) => (-1i8, r),
            None => (1i8, s.strip_prefix('+').unwrap_or(s)),
        };
        let (mant_part, exp10_extra) = match rest.find(['e', 'E']) {
            Some(i) => (&rest[..i], rest[i + 1..].parse::<i64>().ok()?),
            None => (rest, 0i64),
        };
        let (int_part, frac_part) = match mant_part.find('.') {
            Some(i) => (&mant_part[..i], &mant_part[i + 1..]),
            None => (mant_part, ""),
        };
        let digits: String = format!("{int_part}{frac_part}");
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let mant = digits.parse::<BigUint>().ok()?;
        if mant.is_zero() {
            return Some(Self::zero(prec));
        }
        let exp10 = exp10_extra - frac_part.len() as i64;
        // value = mant * 10^exp10 = mant * 5^exp10 * 2^exp10
        let work = prec + 64;
        let mut out = BigFloat { sign, mag: mant, exp: 0, prec: work };
        let five = BigFloat::from_u64(5, work);
        let p5 = five.powi(exp10.unsigned_abs());
        if exp10 >= 0 {
            out = out.mul(&p5);
        } else {
            out = out.div(&p5);
        }
        out.exp += exp10;
        out.prec = prec;
        out.normalize();
        Some(out)
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign < 0
    }

    pub fn signum(&self) -> i8 {
        self.sign
    }

    fn normalize(&mut self) {
        if self.mag.is_zero() {
            self.sign = 0;
            self.exp = 0;
            return;
        }
        let bits = self.mag.bits();
        if bits > self.prec as u64 {
            let shift = bits - self.prec as u64;
            // round half up on the dropped bits
            let round_bit = (&self.mag >> (shift - 1)) & BigUint::one();
            self.mag >>= shift;
            if round_bit.is_one() {
                self.mag += BigUint::one();
            }
            self.exp += shift as i64;
            // carry may have added a bit
            if self.mag.bits() > self.prec as u64 {
                self.mag >>= 1u8;
                self.exp += 1;
            }
        }
    }

    /// Exact scale by 2^k.
    pub fn scale2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut f = self.clone();
        f.exp += k;
        f
    }

    pub fn neg(&self) -> Self {
        let mut f = self.clone();
        f.sign = -f.sign;
        f
    }

    pub fn abs(&self) -> Self {
        let mut f = self.clone();
        f.sign = f.sign.abs();
        f
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        if self.is_zero() {
            let mut r = other.clone();
            r.prec = prec;
            return r;
        }
        if other.is_zero() {
            let mut r = self.clone();
            r.prec = prec;
            return r;
        }
        // order by exponent of the least significant bit: align to min exp
        let (hi, lo) = (self, other);
        let min_exp = hi.exp.min(lo.exp);
        // if one operand is negligibly small, return the other
        let hi_top = hi.exp + hi.mag.bits() as i64;
        let lo_top = lo.exp + lo.mag.bits() as i64;
        if hi_top > lo_top + prec as i64 + 4 {
            let mut r = hi.clone();
            r.prec = prec;
            r.normalize();
            return r;
        }
        if lo_top > hi_top + prec as i64 + 4 {
            let mut r = lo.clone();
            r.prec = prec;
            r.normalize();
            return r;
        }
        let a = &hi.mag << (hi.exp - min_exp) as u64;
        let b = &lo.mag << (lo.exp - min_exp) as u64;
        let (sign, mag) = if hi.sign == lo.sign {
            (hi.sign, a + b)
        } else {
            match a.cmp(&b) {
                Ordering::Equal => (0, BigUint::zero()),
                Ordering::Greater => (hi.sign, a - b),
                Ordering::Less => (lo.sign, b - a),
            }
        };
        let mut f = BigFloat { sign, mag, exp: min_exp, prec };
        f.normalize();
        f
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        if self.is_zero() || other.is_zero() {
            return Self::zero(prec);
        }
        let mut f = BigFloat {
            sign: self.sign * other.sign,
            mag: &self.mag * &other.mag,
            exp: self.exp + other.exp,
            prec,
        };
        f.normalize();
        f
    }

    pub fn mul_u64(&self, k: u64) -> Self {
        self.mul(&BigFloat::from_u64(k, self.prec))
    }

    pub fn div(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        assert!(!other.is_zero(), "division by zero BigFloat");
        if self.is_zero() {
            return Self::zero(prec);
        }
        // keep prec+8 quotient bits regardless of the operand mantissa sizes
        let shift = prec as u64 + 8 + other.mag.bits().saturating_sub(self.mag.bits());
        let num = &self.mag << shift;
        let mag = num / &other.mag;
        let mut f = BigFloat {
            sign: self.sign * other.sign,
            mag,
            exp: self.exp - other.exp - shift as i64,
            prec,
        };
        f.normalize();
        f
    }

    pub fn div_u64(&self, k: u64) -> Self {
        self.div(&BigFloat::from_u64(k, self.prec))
    }

    pub fn recip(&self) -> Self {
        BigFloat::one(self.prec).div(self)
    }

    /// Square root (argument must be >= 0).
    pub fn sqrt(&self) -> Self {
        assert!(self.sign >= 0, "sqrt of negative BigFloat");
        if self.is_zero() {
            return self.clone();
        }
        // scale mantissa so the result keeps full precision
        let want = 2 * (self.prec as u64 + 4);
        let bits = self.mag.bits();
        let mut extra = want.saturating_sub(bits);
        // keep exponent parity even
        if (self.exp - extra as i64) % 2 != 0 {
            extra += 1;
        }
        let scaled = &self.mag << extra;
        let root = scaled.sqrt();
        let mut f = BigFloat {
            sign: 1,
            mag: root,
            exp: (self.exp - extra as i64) / 2,
            prec: self.prec,
        };
        f.normalize();
        f
    }

    pub fn powi(&self, mut n: u64) -> Self {
        let mut base = self.clone();
        let mut acc = BigFloat::one(self.prec);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }

    pub fn cmp_value(&self, other: &Self) -> Ordering {
        if self.sign != other.sign {
            return self.sign.cmp(&other.sign);
        }
        if self.sign == 0 {
            return Ordering::Equal;
        }
        let d = self.sub(other);
        match d.sign {
            0 => Ordering::Equal,
            1 => Ordering::Greater,
            _ => Ordering::Less,
        }
    }

    /// Closest f64 (may overflow to +-inf for huge exponents).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mag.bits();
        let take = bits.min(64);
        let top: BigUint = &self.mag >> (bits - take);
        let digits = top.to_u64_digits();
        let mant = digits.first().copied().unwrap_or(0) as f64;
        let e = self.exp + (bits - take) as i64;
        let val = mant * 2f64.powi(e.clamp(-2000, 2000) as i32);
        if self.sign < 0 {
            -val
        } else {
            val
        }
    }

    /// Nearest integer, as (sign, magnitude) in i64 range.
    pub fn round_to_i64(&self) -> i64 {
        if self.is_zero() {
            return 0;
        }
        let half = BigFloat::from_f64(0.5, self.prec);
        let shifted = if self.sign > 0 { self.add(&half) } else { self.sub(&half) };
        // floor toward zero of |shifted|
        let mag = if shifted.exp >= 0 {
            &shifted.mag << shifted.exp as u64
        } else {
            &shifted.mag >> (-shifted.exp) as u64
        };
        let ds = mag.to_u64_digits();
        let v = ds.first().copied().unwrap_or(0);
        assert!(ds.len() <= 1 && v <= i64::MAX as u64, "round_to_i64 overflow");
        shifted.sign as i64 * v as i64
    }

    /// Decimal string with `digits` significant digits, scientific notation.
    pub fn to_decimal_string(&self, digits: u32) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1);
        // exponent10 estimate of |x| = mag * 2^exp
        let log10 = (self.exp as f64 + self.mag.bits() as f64) * std::f64::consts::LOG10_2;
        let mut e10 = log10.floor() as i64;
        loop {
            // integer I = round(|x| * 10^(digits-1-e10))
            let k = digits as i64 - 1 - e10;
            let ten = BigUint::from(10u8);
            let mut num = self.mag.clone();
            let mut den = BigUint::one();
            if k >= 0 {
                num *= ten.pow(k as u32);
            } else {
                den *= ten.pow((-k) as u32);
            }
            if self.exp >= 0 {
                num <<= self.exp as u64;
            } else {
                den <<= (-self.exp) as u64;
            }
            let i = (num + (&den >> 1u8)) / den;
            let s = i.to_string();
            if s.len() as i64 == digits as i64 {
                let mantissa = if digits == 1 {
                    s
                } else {
                    format!("{}.{}", &s[..1], &s[1..])
                };
                let sgn = if self.sign < 0 { "-" } else { "" };
                return format!("{sgn}{mantissa}e{e10}");
            }
            // estimate was off by one
            e10 += s.len() as i64 - digits as i64;
        }
    }

    // ---- transcendental functions ----

    /// exp(x) by range reduction over ln 2 and Taylor series.
    pub fn exp(&self) -> Self {
        let prec = self.prec;
        let work = prec + 32;
        if self.is_zero() {
            return BigFloat::one(prec);
        }
        let x = self.with_prec(work);
        let l2 = ln2(work);
        let k = x.div(&l2).round_to_i64();
        let r = x.sub(&l2.mul(&BigFloat::from_i64(k, work)));
        // |r| <= ln2/2; Taylor
        let mut term = BigFloat::one(work);
        let mut sum = BigFloat::one(work);
        let limit_exp = -(work as i64) - 8;
        for j in 1..10_000u64 {
            term = term.mul(&r).div_u64(j);
            if term.is_zero() || term.exp + (term.mag.bits() as i64) < limit_exp {
                break;
            }
            sum = sum.add(&term);
        }
        let mut out = sum.scale2(k);
        out.prec = prec;
        out.normalize();
        out
    }

    /// (sin x, cos x) by range reduction over pi/2 and Taylor series.
    pub fn sin_cos(&self) -> (Self, Self) {
        let prec = self.prec;
        let work = prec + 48;
        let x = self.with_prec(work);
        let half_pi = pi(work).scale2(-1);
        let k = x.div(&half_pi).round_to_i64();
        let r = x.sub(&half_pi.mul(&BigFloat::from_i64(k, work)));
        // |r| <= pi/4
        let r2 = r.mul(&r);
        let limit_exp = -(work as i64) - 8;
        // sin series
        let mut term = r.clone();
        let mut s = r.clone();
        let mut j = 1u64;
        loop {
            term = term.mul(&r2).div_u64((2 * j) * (2 * j + 1)).neg();
            if term.is_zero() || term.exp + (term.mag.bits() as i64) < limit_exp {
                break;
            }
            s = s.add(&term);
            j += 1;
        }
        // cos series
        let mut term = BigFloat::one(work);
        let mut c = BigFloat::one(work);
        let mut j = 1u64;
        loop {
            term = term.mul(&r2).div_u64((2 * j - 1) * (2 * j)).neg();
            if term.is_zero() || term.exp + (term.mag.bits() as i64) < limit_exp {
                break;
            }
            c = c.add(&term);
            j += 1;
        }
        let (mut sin, mut cos) = match k.rem_euclid(4) {
            0 => (s, c),
            1 => (c, s.neg()),
            2 => (s.neg(), c.neg()),
            _ => (c.neg(), s),
        };
        sin.prec = prec;
        sin.normalize();
        cos.prec = prec;
        cos.normalize();
        (sin, cos)
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        let mut f = self.clone();
        f.prec = prec;
        f.normalize();
        f
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string((self.prec as f64 / 3.32) as u32))
    }
}

// ---- cached constants ----

struct ConstCache {
    prec: u32,
    value: BigFloat,
}

static LN2_CACHE: Mutex<Option<ConstCache>> = Mutex::new(None);
static PI_CACHE: Mutex<Option<ConstCache>> = Mutex::new(None);

/// ln 2 = 2 atanh(1/3) = 2 sum_{j>=0} (1/3)^(2j+1) / (2j+1).
pub fn ln2(prec: u32) -> BigFloat {
    let mut guard = LN2_CACHE.lock().unwrap();
    if let Some(c) = guard.as_ref() {
        if c.prec >= prec {
            return c.value.with_prec(prec);
        }
    }
    let work = prec + 32;
    let scale = work as u64 + 16;
    let mut t = (BigUint::one() << scale) / BigUint::from(3u8);
    let nine = BigUint::from(9u8);
    let mut sum = BigUint::zero();
    let mut j = 0u64;
    while !t.is_zero() {
        sum += &t / BigUint::from(2 * j + 1);
        t /= &nine;
        j += 1;
    }
    let mut v = BigFloat { sign: 1, mag: sum, exp: -(scale as i64), prec: work };
    v = v.scale2(1);
    v.normalize();
    *guard = Some(ConstCache { prec: work, value: v.clone() });
    v.with_prec(prec)
}

/// pi by Machin's formula: pi = 16 atan(1/5) - 4 atan(1/239).
pub fn pi(prec: u32) -> BigFloat {
    let mut guard = PI_CACHE.lock().unwrap();
    if let Some(c) = guard.as_ref() {
        if c.prec >= prec {
            return c.value.with_prec(prec);
        }
    }
    let work = prec + 32;
    let scale = work as u64 + 16;
    let atan_inv = |q: u64| -> BigFloat {
        let q2 = BigUint::from(q * q);
        let mut t = (BigUint::one() << scale) / BigUint::from(q);
        let mut j = 0u64;
        let mut pos = BigUint::zero();
        let mut neg = BigUint::zero();
        while !t.is_zero() {
            let c = &t / BigUint::from(2 * j + 1);
            if j % 2 == 0 {
                pos += c;
            } else {
                neg += c;
            }
            t /= &q2;
            j += 1;
        }
        let (sign, mag) = if pos >= neg { (1i8, pos - neg) } else { (-1i8, neg - pos) };
        let mut v = BigFloat { sign, mag, exp: -(scale as i64), prec: work };
        v.normalize();
        v
    };
    let v = atan_inv(5).scale2(4).sub(&atan_inv(239).scale2(2));
    *guard = Some(ConstCache { prec: work, value: v.clone() });
    v.with_prec(prec)
}
