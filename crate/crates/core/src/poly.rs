//! Exact Laurent polynomials in at most two commuting variables.
//!
//! Coefficients are arbitrary-precision integers and every comparison is
//! exact. The variable alphabet is fixed (`W`, `B`, `D`, `x`); a polynomial
//! canonically records only the variables it actually uses, so `W^2 + 1`
//! built in a two-variable context equals `W^2 + 1` built in one.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

/// A variable name. The ordering here fixes exponent-tuple order everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    W,
    B,
    D,
    X,
}

impl Var {
    pub fn as_str(self) -> &'static str {
        match self {
            Var::W => "W",
            Var::B => "B",
            Var::D => "D",
            Var::X => "x",
        }
    }

    pub fn parse(s: &str) -> Option<Var> {
        match s {
            "W" => Some(Var::W),
            "B" => Some(Var::B),
            "D" => Some(Var::D),
            "x" | "X" => Some(Var::X),
            _ => None,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

// Exponent tuples are stored at fixed width 2; slots past `vars.len()` stay 0.
type Exps = [i32; 2];

/// Right-hand side of a substitution rule: `±v^k` or an integer constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Subst {
    Monomial { negate: bool, var: Var, exp: i32 },
    Constant(BigInt),
}

impl Subst {
    pub fn var(v: Var) -> Subst {
        Subst::Monomial { negate: false, var: v, exp: 1 }
    }
    pub fn neg(v: Var) -> Subst {
        Subst::Monomial { negate: true, var: v, exp: 1 }
    }
    pub fn inv(v: Var) -> Subst {
        Subst::Monomial { negate: false, var: v, exp: -1 }
    }
    pub fn neg_inv(v: Var) -> Subst {
        Subst::Monomial { negate: true, var: v, exp: -1 }
    }
    pub fn constant(c: impl Into<BigInt>) -> Subst {
        Subst::Constant(c.into())
    }
}

/// An exact integer-coefficient Laurent polynomial in ≤ 2 variables.
///
/// Canonical form: `vars` is sorted and contains exactly the variables that
/// occur with nonzero exponent; `terms` maps exponent tuples (aligned with
/// `vars`, unused slot pinned to 0) to nonzero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LaurentPoly {
    vars: Vec<Var>,
    terms: BTreeMap<Exps, BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyParseError {
    #[error("unexpected character {0:?} in polynomial")]
    UnexpectedChar(char),
    #[error("malformed polynomial near {0:?}")]
    Malformed(String),
}

impl LaurentPoly {
    pub fn zero() -> LaurentPoly {
        LaurentPoly::default()
    }

    pub fn one() -> LaurentPoly {
        LaurentPoly::constant(1)
    }

    pub fn constant(c: impl Into<BigInt>) -> LaurentPoly {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert([0, 0], c);
        }
        LaurentPoly { vars: Vec::new(), terms }
    }

    pub fn var(v: Var) -> LaurentPoly {
        LaurentPoly::monomial(v, 1)
    }

    /// `v^exp` (with `v^0 = 1`).
    pub fn monomial(v: Var, exp: i32) -> LaurentPoly {
        if exp == 0 {
            return LaurentPoly::one();
        }
        let mut terms = BTreeMap::new();
        terms.insert([exp, 0], BigInt::one());
        LaurentPoly { vars: vec![v], terms }
    }

    /// Builds a polynomial from raw terms; duplicate exponent tuples are
    /// summed and the result is canonicalized.
    pub fn from_terms(
        vars: &[Var],
        terms: impl IntoIterator<Item = (Vec<i32>, BigInt)>,
    ) -> LaurentPoly {
        assert!(vars.len() <= 2, "at most two variables are supported");
        let mut sorted: Vec<Var> = vars.to_vec();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), vars.len(), "duplicate variable");
        // position of each input var in the sorted list
        let pos: Vec<usize> = vars
            .iter()
            .map(|v| sorted.iter().position(|s| s == v).unwrap())
            .collect();
        let mut map: BTreeMap<Exps, BigInt> = BTreeMap::new();
        for (exps, coeff) in terms {
            assert_eq!(exps.len(), vars.len(), "exponent tuple width mismatch");
            let mut key = [0i32; 2];
            for (i, e) in exps.iter().enumerate() {
                key[pos[i]] = *e;
            }
            let entry = map.entry(key).or_insert_with(BigInt::zero);
            *entry += coeff;
        }
        map.retain(|_, c| !c.is_zero());
        LaurentPoly { vars: sorted, terms: map }.shrink_vars()
    }

    // Drops variables that no longer occur, remapping exponent tuples.
    fn shrink_vars(mut self) -> LaurentPoly {
        let used: Vec<bool> = (0..self.vars.len())
            .map(|i| self.terms.keys().any(|k| k[i] != 0))
            .collect();
        if used.iter().all(|&u| u) {
            return self;
        }
        let kept: Vec<Var> = self
            .vars
            .iter()
            .zip(&used)
            .filter(|(_, &u)| u)
            .map(|(v, _)| *v)
            .collect();
        let mut terms = BTreeMap::new();
        for (k, c) in std::mem::take(&mut self.terms) {
            let mut nk = [0i32; 2];
            let mut j = 0;
            for i in 0..self.vars.len() {
                if used[i] {
                    nk[j] = k[i];
                    j += 1;
                }
            }
            terms.insert(nk, c);
        }
        LaurentPoly { vars: kept, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.vars.is_empty() && self.terms.get(&[0, 0]).is_some_and(|c| c.is_one())
    }

    /// The constant value, if this polynomial has no variables.
    pub fn as_constant(&self) -> Option<BigInt> {
        if !self.vars.is_empty() {
            return None;
        }
        Some(self.terms.get(&[0, 0]).cloned().unwrap_or_else(BigInt::zero))
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    /// Terms in ascending lexicographic exponent order, tuples trimmed to the
    /// variable count.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<i32>, &BigInt)> + '_ {
        let n = self.vars.len();
        self.terms.iter().map(move |(k, c)| (k[..n].to_vec(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of the given monomial, e.g. `coeff(&[(Var::W, 2)])`.
    pub fn coeff(&self, monomial: &[(Var, i32)]) -> BigInt {
        let mut key = [0i32; 2];
        for (v, e) in monomial {
            match self.vars.iter().position(|s| s == v) {
                Some(i) => key[i] = *e,
                None if *e == 0 => {}
                None => return BigInt::zero(),
            }
        }
        self.terms.get(&key).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Largest |exponent| over all variables and terms (0 for constants).
    pub fn max_abs_exponent(&self) -> i32 {
        self.terms
            .keys()
            .flat_map(|k| k.iter().map(|e| e.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Exponent range of `v`, as (min, max), if `v` occurs.
    pub fn exponent_range(&self, v: Var) -> Option<(i32, i32)> {
        let i = self.vars.iter().position(|s| *s == v)?;
        let exps = self.terms.keys().map(|k| k[i]);
        let min = exps.clone().min()?;
        let max = exps.max()?;
        Some((min, max))
    }

    // Aligns two polynomials to a common sorted variable list.
    // Panics when the union needs more than two variables: the operands live
    // in genuinely different rings and the caller has mixed them up.
    fn aligned(a: &LaurentPoly, b: &LaurentPoly) -> (Vec<Var>, Vec<usize>, Vec<usize>) {
        let mut union: Vec<Var> = a.vars.iter().chain(b.vars.iter()).copied().collect();
        union.sort();
        union.dedup();
        assert!(
            union.len() <= 2,
            "polynomials in incompatible variable rings: {:?} vs {:?}",
            a.vars,
            b.vars
        );
        let map = |vars: &[Var]| -> Vec<usize> {
            vars.iter()
                .map(|v| union.iter().position(|u| u == v).unwrap())
                .collect()
        };
        (union.clone(), map(&a.vars), map(&b.vars))
    }

    fn remap(key: &Exps, map: &[usize]) -> Exps {
        let mut nk = [0i32; 2];
        for (i, &slot) in map.iter().enumerate() {
            nk[slot] = key[i];
        }
        nk
    }

    fn add_impl(a: &LaurentPoly, b: &LaurentPoly, negate_b: bool) -> LaurentPoly {
        let (vars, ma, mb) = LaurentPoly::aligned(a, b);
        let mut terms: BTreeMap<Exps, BigInt> = BTreeMap::new();
        for (k, c) in &a.terms {
            *terms.entry(Self::remap(k, &ma)).or_insert_with(BigInt::zero) += c;
        }
        for (k, c) in &b.terms {
            let entry = terms.entry(Self::remap(k, &mb)).or_insert_with(BigInt::zero);
            if negate_b {
                *entry -= c;
            } else {
                *entry += c;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        LaurentPoly { vars, terms }.shrink_vars()
    }

    fn mul_impl(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
        let (vars, ma, mb) = LaurentPoly::aligned(a, b);
        let mut terms: BTreeMap<Exps, BigInt> = BTreeMap::new();
        for (ka, ca) in &a.terms {
            let ka = Self::remap(ka, &ma);
            for (kb, cb) in &b.terms {
                let kb = Self::remap(kb, &mb);
                let key = [ka[0] + kb[0], ka[1] + kb[1]];
                *terms.entry(key).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        LaurentPoly { vars, terms }.shrink_vars()
    }

    pub fn pow(&self, n: u32) -> LaurentPoly {
        let mut acc = LaurentPoly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Simultaneous substitution. Each rule sends a variable to `±v^k` or to
    /// a constant; variables without a rule stay put. Substituting a
    /// non-unit constant into a negative exponent has no Laurent result and
    /// panics.
    pub fn substitute(&self, rules: &[(Var, Subst)]) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (key, coeff) in &self.terms {
            let mut acc = LaurentPoly::constant(coeff.clone());
            for (i, v) in self.vars.iter().enumerate() {
                let e = key[i];
                if e == 0 {
                    continue;
                }
                let rule = rules.iter().find(|(rv, _)| rv == v).map(|(_, s)| s);
                match rule {
                    None => acc *= &LaurentPoly::monomial(*v, e),
                    Some(Subst::Monomial { negate, var, exp }) => {
                        let mut m = LaurentPoly::monomial(*var, exp * e);
                        if *negate && e.rem_euclid(2) == 1 {
                            m = -m;
                        }
                        acc *= &m;
                    }
                    Some(Subst::Constant(c)) => {
                        if e > 0 {
                            acc *= &LaurentPoly::constant(c.pow(e as u32));
                        } else if c.is_one() {
                            // 1^e = 1
                        } else if (-c).is_one() {
                            if e.rem_euclid(2) == 1 {
                                acc = -acc;
                            }
                        } else {
                            panic!("substituting non-unit constant {c} into exponent {e}");
                        }
                    }
                }
            }
            out += &acc;
        }
        out
    }

    /// Evaluates the polynomial with `v` replaced by an arbitrary polynomial
    /// `value`. Requires every exponent of `v` to be non-negative.
    pub fn eval_at(&self, v: Var, value: &LaurentPoly) -> LaurentPoly {
        let Some(i) = self.vars.iter().position(|s| *s == v) else {
            return self.clone();
        };
        let mut out = LaurentPoly::zero();
        for (key, coeff) in &self.terms {
            let e = key[i];
            assert!(e >= 0, "eval_at needs non-negative exponents of {v}");
            let mut rest_key = *key;
            rest_key[i] = 0;
            let rest = LaurentPoly {
                vars: self.vars.clone(),
                terms: BTreeMap::from([(rest_key, coeff.clone())]),
            }
            .shrink_vars();
            out += &(&rest * &value.pow(e as u32));
        }
        out
    }

    /// Searches for `q` with `p(W) = q(W) + q(-W^{-1})`, coefficients
    /// supported on exponents in `[-window, window]`.
    ///
    /// Writing `p = Σ p_e W^e`, such a `q` exists iff `p_0` is even and
    /// `p_e = (-1)^e p_{-e}` for every `e > 0`; the witness returned splits
    /// each symmetric pair as evenly as possible. Requires `p` univariate
    /// in `W` (or constant).
    pub fn decompose_symmetric(&self, window: i32) -> Option<LaurentPoly> {
        assert!(
            self.vars.is_empty() || self.vars == [Var::W],
            "decompose_symmetric needs a polynomial in W only"
        );
        if self.max_abs_exponent() > window {
            return None;
        }
        let two = BigInt::from(2);
        let p = |e: i32| -> BigInt { self.coeff(&[(Var::W, e)]) };
        let mut q_terms: Vec<(Vec<i32>, BigInt)> = Vec::new();
        // e = 0: p_0 = 2 q_0
        let p0 = p(0);
        if !p0.is_even() {
            return None;
        }
        let q0 = &p0 / &two;
        if !q0.is_zero() {
            q_terms.push((vec![0], q0));
        }
        let top = self.max_abs_exponent();
        for e in 1..=top {
            let sign = if e % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            let (pe, pne) = (p(e), p(-e));
            if pe != &sign * &pne {
                return None;
            }
            // balanced split: q_e = ceil(p_e / 2), q_{-e} = p_{-e} - (-1)^e q_e
            let qe = (&pe + BigInt::one()).div_floor(&two);
            let qne = &pne - &sign * &qe;
            if !qe.is_zero() {
                q_terms.push((vec![e], qe));
            }
            if !qne.is_zero() {
                q_terms.push((vec![-e], qne));
            }
        }
        Some(LaurentPoly::from_terms(&[Var::W], q_terms))
    }

    /// Default search window for [`decompose_symmetric`](Self::decompose_symmetric).
    pub fn default_decompose_window(&self) -> i32 {
        self.max_abs_exponent() + 2
    }

    /// Exact division: `Some(q)` with `self = q * d`, or `None`.
    pub fn exact_div(&self, d: &LaurentPoly) -> Option<LaurentPoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(LaurentPoly::zero());
        }
        let (vars, ma, mb) = LaurentPoly::aligned(self, d);
        let collect = |p: &LaurentPoly, m: &[usize]| -> BTreeMap<Exps, BigInt> {
            p.terms
                .iter()
                .map(|(k, c)| (Self::remap(k, m), c.clone()))
                .collect()
        };
        let mut rem = collect(self, &ma);
        let div = collect(d, &mb);
        // Shift both supports into ℕ² so lexicographic order is a well-order,
        // then divide by the single leading term of `div` repeatedly.
        let shift_of = |m: &BTreeMap<Exps, BigInt>| -> Exps {
            let mut s = [i32::MAX; 2];
            for k in m.keys() {
                s[0] = s[0].min(k[0]);
                s[1] = s[1].min(k[1]);
            }
            s
        };
        let shift = |m: BTreeMap<Exps, BigInt>, s: Exps| -> BTreeMap<Exps, BigInt> {
            m.into_iter()
                .map(|(k, c)| ([k[0] - s[0], k[1] - s[1]], c))
                .collect()
        };
        let (sr, sd) = (shift_of(&rem), shift_of(&div));
        rem = shift(rem, sr);
        let div = shift(div, sd);
        let (dk, dc) = div.iter().next_back().map(|(k, c)| (*k, c.clone())).unwrap();
        let mut quot: BTreeMap<Exps, BigInt> = BTreeMap::new();
        while let Some((rk, rc)) = rem.iter().next_back().map(|(k, c)| (*k, c.clone())) {
            let qk = [rk[0] - dk[0], rk[1] - dk[1]];
            if qk[0] < 0 || qk[1] < 0 {
                return None;
            }
            let (qc, r) = rc.div_rem(&dc);
            if !r.is_zero() {
                return None;
            }
            for (k, c) in &div {
                let key = [k[0] + qk[0], k[1] + qk[1]];
                let entry = rem.entry(key).or_insert_with(BigInt::zero);
                *entry -= &qc * c;
                if entry.is_zero() {
                    rem.remove(&key);
                }
            }
            quot.insert(qk, qc);
        }
        // Undo the shifts: self = x^sr rem0, d = x^sd div0 ⇒ q = x^(sr-sd) quot.
        let n = vars.len();
        let terms: Vec<(Vec<i32>, BigInt)> = quot
            .into_iter()
            .map(|(k, c)| {
                let full = [k[0] + sr[0] - sd[0], k[1] + sr[1] - sd[1]];
                (full[..n].to_vec(), c)
            })
            .collect();
        Some(LaurentPoly::from_terms(&vars, terms))
    }

    /// Normalizes a univariate polynomial up to units `±v^k`: the lowest
    /// exponent becomes 0 and the top coefficient positive.
    pub fn normalized_up_to_units(&self) -> LaurentPoly {
        assert!(self.vars.len() <= 1, "unit normalization is univariate");
        if self.is_zero() {
            return LaurentPoly::zero();
        }
        if self.vars.is_empty() {
            let c = self.as_constant().unwrap();
            return LaurentPoly::constant(c.abs());
        }
        let v = self.vars[0];
        let (min, max) = self.exponent_range(v).unwrap();
        let shifted = self * &LaurentPoly::monomial(v, -min);
        if shifted.coeff(&[(v, max - min)]).is_negative() {
            -shifted
        } else {
            shifted
        }
    }

    /// Same polynomial up to multiplication by `±v^k`.
    pub fn equals_up_to_units(&self, other: &LaurentPoly) -> bool {
        self.normalized_up_to_units() == other.normalized_up_to_units()
    }

    /// Parses the canonical text form, e.g. `W^2 - W*B + W - B + 1`.
    pub fn parse(input: &str) -> Result<LaurentPoly, PolyParseError> {
        let mut chars = input.chars().peekable();
        let mut out = LaurentPoly::zero();
        let mut any = false;
        loop {
            while chars.peek().is_some_and(|c| c.is_whitespace()) {
                chars.next();
            }
            let sign = match chars.peek() {
                None if any => break,
                None => return Err(PolyParseError::Malformed("empty input".into())),
                Some('+') => {
                    chars.next();
                    1
                }
                Some('-') => {
                    chars.next();
                    -1
                }
                Some(_) if !any => 1,
                Some(&c) => return Err(PolyParseError::UnexpectedChar(c)),
            };
            while chars.peek().is_some_and(|c| c.is_whitespace()) {
                chars.next();
            }
            // term: [integer] ('*'? factor)*  — at least one of the two
            let mut coeff: Option<BigInt> = None;
            let mut mono = LaurentPoly::one();
            let mut got = false;
            loop {
                match chars.peek() {
                    Some(c) if c.is_ascii_digit() => {
                        let mut s = String::new();
                        while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                            s.push(chars.next().unwrap());
                        }
                        if coeff.is_some() || got {
                            return Err(PolyParseError::Malformed(s));
                        }
                        coeff = Some(s.parse().unwrap());
                    }
                    Some(c) if c.is_ascii_alphabetic() => {
                        let c = chars.next().unwrap();
                        let v = Var::parse(&c.to_string())
                            .ok_or(PolyParseError::UnexpectedChar(c))?;
                        let mut exp = 1i32;
                        if chars.peek() == Some(&'^') {
                            chars.next();
                            let mut s = String::new();
                            if chars.peek() == Some(&'-') {
                                s.push(chars.next().unwrap());
                            }
                            while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                                s.push(chars.next().unwrap());
                            }
                            exp = s
                                .parse()
                                .map_err(|_| PolyParseError::Malformed(s.clone()))?;
                        }
                        mono = &mono * &LaurentPoly::monomial(v, exp);
                        got = true;
                    }
                    Some('*') => {
                        chars.next();
                    }
                    _ => break,
                }
            }
            if coeff.is_none() && !got {
                return Err(PolyParseError::Malformed("missing term".into()));
            }
            let c = coeff.unwrap_or_else(BigInt::one) * BigInt::from(sign);
            out += &(&LaurentPoly::constant(c) * &mono);
            any = true;
            while chars.peek().is_some_and(|c| c.is_whitespace()) {
                chars.next();
            }
            if chars.peek().is_none() {
                break;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for LaurentPoly {
    /// Terms in decreasing lexicographic exponent order: `W^2 - W*B + W - B + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (key, coeff)) in self.terms.iter().rev().enumerate() {
            let neg = coeff.is_negative();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else if neg {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let mag = coeff.abs();
            let mut parts: Vec<String> = Vec::new();
            for (j, v) in self.vars.iter().enumerate() {
                match key[j] {
                    0 => {}
                    1 => parts.push(v.to_string()),
                    e => parts.push(format!("{v}^{e}")),
                }
            }
            if parts.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&parts.join("*"))?;
            } else {
                write!(f, "{mag}*{}", parts.join("*"))?;
            }
        }
        Ok(())
    }
}

// --- operator impls -------------------------------------------------------

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::add_impl(self, rhs, false)
    }
}
impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::add_impl(self, rhs, true)
    }
}
impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::mul_impl(self, rhs)
    }
}
impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        let terms = self.terms.iter().map(|(k, c)| (*k, -c)).collect();
        LaurentPoly { vars: self.vars.clone(), terms }
    }
}
impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        &self + &rhs
    }
}
impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}
impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}
impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}
impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        *self = &*self + rhs;
    }
}
impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        *self = &*self - rhs;
    }
}
impl MulAssign<&LaurentPoly> for LaurentPoly {
    fn mul_assign(&mut self, rhs: &LaurentPoly) {
        *self = &*self * rhs;
    }
}

// --- serde ----------------------------------------------------------------

mod serde_impl {
    use super::*;
    use serde::de::Error as DeError;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct TermRepr {
        exponents: Vec<i32>,
        coeff: CoeffRepr,
    }

    // i64 covers every realistic coefficient; huge values fall back to a
    // decimal string so nothing is ever rounded.
    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum CoeffRepr {
        Small(i64),
        Big(String),
    }

    #[derive(Serialize, Deserialize)]
    struct PolyRepr {
        variables: Vec<String>,
        terms: Vec<TermRepr>,
    }

    impl Serialize for LaurentPoly {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            let repr = PolyRepr {
                variables: self.vars.iter().map(|v| v.to_string()).collect(),
                terms: self
                    .terms()
                    .map(|(exps, c)| TermRepr {
                        exponents: exps,
                        coeff: match i64::try_from(c) {
                            Ok(v) => CoeffRepr::Small(v),
                            Err(_) => CoeffRepr::Big(c.to_string()),
                        },
                    })
                    .collect(),
            };
            repr.serialize(s)
        }
    }

    impl<'de> Deserialize<'de> for LaurentPoly {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            let repr = PolyRepr::deserialize(d)?;
            let vars: Vec<Var> = repr
                .variables
                .iter()
                .map(|s| Var::parse(s).ok_or_else(|| D::Error::custom(format!("unknown variable {s:?}"))))
                .collect::<Result<_, _>>()?;
            if vars.len() > 2 {
                return Err(D::Error::custom("more than two variables"));
            }
            let terms: Vec<(Vec<i32>, BigInt)> = repr
                .terms
                .into_iter()
                .map(|t| {
                    if t.exponents.len() != vars.len() {
                        return Err(D::Error::custom("exponent tuple width mismatch"));
                    }
                    let c = match t.coeff {
                        CoeffRepr::Small(v) => BigInt::from(v),
                        CoeffRepr::Big(s) => s
                            .parse()
                            .map_err(|_| D::Error::custom(format!("bad coefficient {s:?}")))?,
                    };
                    Ok((t.exponents, c))
                })
                .collect::<Result<_, _>>()?;
            Ok(LaurentPoly::from_terms(&vars, terms))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> LaurentPoly {
        LaurentPoly::parse(s).unwrap()
    }

    #[test]
    fn display_canonical_forms() {
        assert_eq!(p("W^2 - W*B + W - B + 1").to_string(), "W^2 - W*B + W - B + 1");
        assert_eq!(p("W^2 - 1 + W^-2").to_string(), "W^2 - 1 + W^-2");
        assert_eq!(
            p("2*W^2 + 2*W - 2 - 2*W^-1 + 2*W^-2").to_string(),
            "2*W^2 + 2*W - 2 - 2*W^-1 + 2*W^-2"
        );
        assert_eq!(p("-W^-1").to_string(), "-W^-1");
        assert_eq!(p("W + 1").to_string(), "W + 1");
        assert_eq!(LaurentPoly::zero().to_string(), "0");
        assert_eq!(p("x^2 - x + 1").to_string(), "x^2 - x + 1");
    }

    #[test]
    fn ring_identities() {
        let w = LaurentPoly::var(Var::W);
        let winv = LaurentPoly::monomial(Var::W, -1);
        assert!( (&w * &winv).is_one());
        let z = &w - &winv;
        assert_eq!(&z * &z, p("W^2 - 2 + W^-2"));
        // the two single-star potentials of the same three-crossing knotoid
        let tail = p("W^2 - W*B + W - B + 1");
        let head = p("B^2 - W*B + W - B + 1");
        assert_eq!(&tail - &head, p("W^2 - B^2"));
    }

    #[test]
    fn constants_mix_with_anything() {
        let c = LaurentPoly::constant(3);
        assert_eq!(&c * &p("W - B"), p("3*W - 3*B"));
        assert_eq!(&p("D^2") + &LaurentPoly::one(), p("D^2 + 1"));
    }

    #[test]
    fn unused_variables_are_dropped() {
        let q = p("W^2 + W*B") - p("W*B");
        assert_eq!(q.vars(), &[Var::W]);
        assert_eq!(q, p("W^2"));
    }

    #[test]
    fn substitute_swap_and_specialize() {
        let pot = p("W^2 - W*B + W - B + 1");
        let swapped = pot.substitute(&[(Var::W, Subst::neg(Var::B)), (Var::B, Subst::neg(Var::W))]);
        assert_eq!(swapped, p("B^2 - W*B + W - B + 1"));
        // applying the swap twice is the identity
        let back = swapped.substitute(&[(Var::W, Subst::neg(Var::B)), (Var::B, Subst::neg(Var::W))]);
        assert_eq!(back, pot);
        let mock = pot.substitute(&[(Var::B, Subst::inv(Var::W))]);
        assert_eq!(mock, p("W^2 + W - W^-1"));
        // identity rules change nothing
        assert_eq!(pot.substitute(&[(Var::W, Subst::var(Var::W))]), pot);
        // rules for absent variables are no-ops
        assert_eq!(p("W^2").substitute(&[(Var::B, Subst::inv(Var::W))]), p("W^2"));
    }

    #[test]
    fn substitute_constants() {
        let q = p("W^2 - 3*W + 1");
        assert_eq!(q.substitute(&[(Var::W, Subst::constant(2))]), LaurentPoly::constant(-1));
        let l = p("W - W^-1");
        assert_eq!(l.substitute(&[(Var::W, Subst::constant(-1))]), LaurentPoly::zero());
    }

    #[test]
    fn eval_at_composes() {
        let conway = p("x^2 + 1");
        let z = p("W - W^-1");
        assert_eq!(conway.eval_at(Var::X, &z), p("W^2 - 1 + W^-2"));
    }

    #[test]
    fn decompose_symmetric_witness() {
        let pv = p("W^2 + W^-2 + 2*W - 2*W^-1");
        let q = pv.decompose_symmetric(pv.default_decompose_window()).unwrap();
        assert_eq!(q, p("W^2 + W - W^-1"));
        let back = &q + &q.substitute(&[(Var::W, Subst::neg_inv(Var::W))]);
        assert_eq!(back, pv);
    }

    #[test]
    fn decompose_symmetric_obstruction() {
        // the W^-3 term has no matching -W^3 partner
        let pv = p("2*W^2 + W - W^-1 + W^-2 - W^-3 - 1");
        assert_eq!(pv.decompose_symmetric(pv.default_decompose_window()), None);
        // odd constant term
        assert_eq!(p("1").decompose_symmetric(4), None);
    }

    #[test]
    fn decompose_symmetric_zero() {
        assert_eq!(LaurentPoly::zero().decompose_symmetric(2), Some(LaurentPoly::zero()));
    }

    #[test]
    fn exact_division() {
        assert_eq!(p("W^2 - B^2").exact_div(&p("W - B")), Some(p("W + B")));
        assert_eq!(p("W^2 - B^2").exact_div(&p("W + 1")), None);
        assert_eq!(p("W - W^-1").exact_div(&p("W^-1")), Some(p("W^2 - 1")));
        assert_eq!(p("2*W").exact_div(&p("3")), None);
        assert_eq!(LaurentPoly::zero().exact_div(&p("W")), Some(LaurentPoly::zero()));
    }

    #[test]
    fn unit_normalization() {
        let q = p("-x^3 + x^2 - x");
        assert_eq!(q.normalized_up_to_units(), p("x^2 - x + 1"));
        assert!(q.equals_up_to_units(&p("x^2 - x + 1")));
        assert!(!q.equals_up_to_units(&p("x^2 + x + 1")));
        assert_eq!(LaurentPoly::constant(-3).normalized_up_to_units(), LaurentPoly::constant(3));
    }

    #[test]
    fn parse_round_trip() {
        for s in [
            "0",
            "1",
            "-1",
            "W^2 - W*B + W - B + 1",
            "2*W^2 + 2*W - 2 - 2*W^-1 + 2*W^-2",
            "-W^-1",
            "x^2 - x + 1",
            "D^-1 + D",
        ] {
            let q = p(s);
            assert_eq!(LaurentPoly::parse(&q.to_string()).unwrap(), q, "{s}");
        }
        assert_eq!(p("W^2-W*B+W-B+1"), p("W^2 - W*B + W - B + 1"));
        assert!(LaurentPoly::parse("W +").is_err());
        assert!(LaurentPoly::parse("y").is_err());
    }

    #[test]
    fn serde_round_trip() {
        let q = p("W^2 - W*B + W - B + 1");
        let json = serde_json::to_string(&q).unwrap();
        assert_eq!(serde_json::from_str::<LaurentPoly>(&json).unwrap(), q);
        let z: LaurentPoly = serde_json::from_str(r#"{"variables":[],"terms":[]}"#).unwrap();
        assert!(z.is_zero());
    }
}
