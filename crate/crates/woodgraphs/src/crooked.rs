//! Candidate functions Q : V -> W over GF(2)-vector spaces, stored as
//! exhaustive value tables, and deciders for the three crookedness conditions:
//!
//! 1. Q(0) = 0;
//! 2. no four distinct inputs summing to zero have images summing to zero
//!    (Q is almost perfect nonlinear, APN);
//! 3. no three derivative values Q(x) + Q(x+a), a != 0, sum to zero
//!    (inputs may repeat).
//!
//! Each condition has an optimized decider and the module also ships a
//! brute-force oracle (`is_crooked_naive`) that enumerates the defining
//! quantifiers literally; the two must agree and the test suite holds them to
//! that.
//!
//! Witness ordering: condition-2 witnesses are the lexicographically least
//! violating quadruple (sorted ascending); condition-3 witnesses are least
//! under the ordering (a, x1, x2, x3), i.e. the earliest violating derivative
//! direction wins, then the input triple.

use rayon::prelude::*;
use thiserror::Error;

use crate::field::{FieldCtx, Gf2Elem, MAX_DEGREE};

/// Largest degree accepted by the naive oracle (its condition-2 loop is q^4).
pub const MAX_NAIVE_DEGREE: u32 = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CrookedError {
    #[error("table degree {0} out of range (expected 1..={MAX_DEGREE})")]
    DegreeOutOfRange(u32),
    #[error("table has {got} entries, expected {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("table entry {value} at index {index} does not fit in {n} bits")]
    ValueOutOfRange { index: usize, value: u32, n: u32 },
    #[error("naive verification is capped at degree {MAX_NAIVE_DEGREE}, got {0}")]
    NaiveTooLarge(u32),
    #[error("malformed function table: {0}")]
    Parse(String),
}

/// Exhaustive value table of a candidate function Q : GF(2^n) -> GF(2^n),
/// indexed by the canonical integer value of the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    n: u32,
    values: Vec<u32>,
}

impl FunctionTable {
    /// Wraps a raw value table, validating the length (2^n) and that every
    /// entry fits in n bits.
    pub fn new(n: u32, values: Vec<u32>) -> Result<FunctionTable, CrookedError> {
        if n < 1 || n > MAX_DEGREE {
            return Err(CrookedError::DegreeOutOfRange(n));
        }
        let expected = 1usize << n;
        if values.len() != expected {
            return Err(CrookedError::WrongLength { expected, got: values.len() });
        }
        for (index, &value) in values.iter().enumerate() {
            if value >> n != 0 {
                return Err(CrookedError::ValueOutOfRange { index, value, n });
            }
        }
        Ok(FunctionTable { n, values })
    }

    /// Tabulates the power map x -> x^d over the given field.
    pub fn power_map(ctx: &FieldCtx, d: u64) -> FunctionTable {
        assert!(d >= 1, "power-map exponent must be at least 1");
        let values = ctx
            .elements()
            .map(|x| ctx.pow(x, d).bits())
            .collect();
        FunctionTable { n: ctx.degree(), values }
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.n
    }

    /// Domain size q = 2^n.
    #[inline]
    pub fn domain_size(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn value(&self, x: u32) -> u32 {
        self.values[x as usize]
    }

    #[inline]
    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// Renders the interchange text format: first line n, then 2^n lines of
    /// integer values in input order.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 4 + 8);
        out.push_str(&self.n.to_string());
        out.push('\n');
        for v in &self.values {
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the interchange text format produced by [`Self::to_text`].
    pub fn from_text(text: &str) -> Result<FunctionTable, CrookedError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let n: u32 = lines
            .next()
            .ok_or_else(|| CrookedError::Parse("empty input".into()))?
            .parse()
            .map_err(|e| CrookedError::Parse(format!("bad degree line: {e}")))?;
        let mut values = Vec::new();
        for line in lines {
            let v: u32 = line
                .parse()
                .map_err(|e| CrookedError::Parse(format!("bad value {line:?}: {e}")))?;
            values.push(v);
        }
        FunctionTable::new(n, values)
    }
}

/// A violating quadruple for the APN condition: four distinct inputs, sorted
/// ascending, with zero input sum and zero image sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ApnWitness {
    pub quad: [u32; 4],
}

/// A violating tuple for the derivative-triple condition: three inputs
/// (repetition allowed) and a nonzero direction a with
/// sum_i Q(x_i) + Q(x_i + a) = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DerivativeWitness {
    pub xs: [u32; 3],
    pub a: u32,
}

impl DerivativeWitness {
    /// Canonical ordering key: direction first, then the input triple.
    #[inline]
    fn key(&self) -> (u32, [u32; 3]) {
        (self.a, self.xs)
    }
}

/// Per-condition verdict; a `None` violation means the condition holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrookedVerdict {
    /// Condition 1: Q(0) = 0.
    pub maps_zero_to_zero: bool,
    /// Condition 2 (APN); the witness is re-checkable against the table.
    pub apn_violation: Option<ApnWitness>,
    /// Condition 3 (derivative triples); re-checkable likewise.
    pub derivative_violation: Option<DerivativeWitness>,
}

impl CrookedVerdict {
    /// Overall pass: all three conditions hold.
    pub fn passes(&self) -> bool {
        self.maps_zero_to_zero
            && self.apn_violation.is_none()
            && self.derivative_violation.is_none()
    }
}

impl std::fmt::Display for CrookedVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.passes() {
            return write!(f, "crooked");
        }
        let mut parts = Vec::new();
        if !self.maps_zero_to_zero {
            parts.push("Q(0) != 0".to_string());
        }
        if let Some(w) = &self.apn_violation {
            parts.push(format!("zero-sum quadruple {:?}", w.quad));
        }
        if let Some(w) = &self.derivative_violation {
            parts.push(format!("derivative triple {:?} at a={}", w.xs, w.a));
        }
        write!(f, "not crooked: {}", parts.join("; "))
    }
}

fn sort4(mut q: [u32; 4]) -> [u32; 4] {
    q.sort_unstable();
    q
}

/// Decides the APN condition by derivative multiplicity counting: Q is APN
/// iff for every s != 0 the map x -> Q(x) + Q(x+s) takes each value exactly
/// twice (on the forced pair {x, x+s}). A value reached by two distinct pairs
/// {x, x+s}, {y, y+s} yields the violating quadruple {x, x+s, y, y+s}.
///
/// Cost O(q^2) over the whole table. Returns the lexicographically least
/// violating quadruple; per bucket the two pairs with the least
/// representatives already realize the bucket minimum, and the global minimum
/// is taken across all buckets of all s.
pub fn apn_violation(table: &FunctionTable) -> Option<ApnWitness> {
    let q = table.domain_size() as u32;
    let values = table.values();

    struct Scratch {
        stamp: Vec<u32>,
        first: Vec<u32>,
        has_second: Vec<bool>,
    }

    (1..q)
        .into_par_iter()
        .fold(
            || {
                (
                    Scratch {
                        stamp: vec![0; q as usize],
                        first: vec![0; q as usize],
                        has_second: vec![false; q as usize],
                    },
                    None::<[u32; 4]>,
                )
            },
            |(mut sc, mut best), s| {
                for x in 0..q {
                    let y = x ^ s;
                    if x > y {
                        continue;
                    }
                    let v = (values[x as usize] ^ values[y as usize]) as usize;
                    if sc.stamp[v] != s {
                        sc.stamp[v] = s;
                        sc.first[v] = x;
                        sc.has_second[v] = false;
                    } else if !sc.has_second[v] {
                        sc.has_second[v] = true;
                        let f = sc.first[v];
                        let cand = sort4([f, f ^ s, x, y]);
                        if best.map_or(true, |b| cand < b) {
                            best = Some(cand);
                        }
                    }
                    // Further pairs in this bucket cannot beat the first two.
                }
                (sc, best)
            },
        )
        .map(|(_, best)| best)
        .reduce(|| None, |a, b| match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        })
        .map(|quad| ApnWitness { quad })
}

/// Decides the derivative-triple condition. For each a != 0 let
/// T_a = { Q(x) + Q(x+a) : x } as a set; the condition fails iff some
/// t1, t2 in T_a (possibly equal) have t1 + t2 in T_a, because input
/// repetition is permitted and x, x+a realize the same derivative value.
///
/// Cost O(q^2) per direction, O(q^3) total. The witness is minimal under
/// (a, x1, x2, x3), each x_i being the least preimage of its derivative
/// value.
pub fn derivative_violation(table: &FunctionTable) -> Option<DerivativeWitness> {
    let q = table.domain_size() as u32;
    let values = table.values();
    let words = (q as usize + 63) / 64;

    struct Scratch {
        deriv: Vec<u32>,
        member: Vec<u64>,
        reps: Vec<u32>,
        stamp: Vec<u32>,
        first: Vec<u32>,
    }

    let best = (1..q)
        .into_par_iter()
        .fold(
            || {
                (
                    Scratch {
                        deriv: vec![0; q as usize],
                        member: vec![0; words],
                        reps: Vec::with_capacity(q as usize / 2 + 1),
                        stamp: vec![0; q as usize],
                        first: vec![0; q as usize],
                    },
                    None::<DerivativeWitness>,
                )
            },
            |(mut sc, mut best), a| {
                sc.member.iter_mut().for_each(|w| *w = 0);
                sc.reps.clear();
                for x in 0..q {
                    let t = values[x as usize] ^ values[(x ^ a) as usize];
                    sc.deriv[x as usize] = t;
                    sc.member[(t / 64) as usize] |= 1u64 << (t % 64);
                    if sc.stamp[t as usize] != a {
                        sc.stamp[t as usize] = a;
                        sc.first[t as usize] = x;
                        sc.reps.push(x);
                    }
                }
                // reps is ascending; the first (i, j) hit realizes the least
                // (x1, x2, x3) for this direction.
                'scan: for (i, &x1) in sc.reps.iter().enumerate() {
                    let t1 = sc.deriv[x1 as usize];
                    for &x2 in &sc.reps[i..] {
                        let t3 = t1 ^ sc.deriv[x2 as usize];
                        if sc.member[(t3 / 64) as usize] >> (t3 % 64) & 1 != 0 {
                            let w = DerivativeWitness { xs: [x1, x2, sc.first[t3 as usize]], a };
                            if best.map_or(true, |b: DerivativeWitness| w.key() < b.key()) {
                                best = Some(w);
                            }
                            break 'scan;
                        }
                    }
                }
                (sc, best)
            },
        )
        .map(|(_, best)| best)
        .reduce(|| None, |x, y| match (x, y) {
            (Some(a), Some(b)) => Some(if a.key() <= b.key() { a } else { b }),
            (a, b) => a.or(b),
        });
    best
}

/// Runs all three crookedness conditions with the optimized deciders.
pub fn is_crooked(table: &FunctionTable) -> CrookedVerdict {
    CrookedVerdict {
        maps_zero_to_zero: table.value(0) == 0,
        apn_violation: apn_violation(table),
        derivative_violation: derivative_violation(table),
    }
}

/// Brute-force reference oracle: enumerates the defining quantifiers
/// literally (all q^4 quadruples, all q^3 (q-1) derivative triples). Capped
/// at degree 5; exists to validate the optimized deciders, not to be fast.
pub fn is_crooked_naive(table: &FunctionTable) -> Result<CrookedVerdict, CrookedError> {
    let n = table.degree();
    if n > MAX_NAIVE_DEGREE {
        return Err(CrookedError::NaiveTooLarge(n));
    }
    let q = table.domain_size() as u32;
    let v = table.values();

    let mut apn = None;
    'apn: for x1 in 0..q {
        for x2 in 0..q {
            for x3 in 0..q {
                for x4 in 0..q {
                    let distinct = x1 != x2
                        && x1 != x3
                        && x1 != x4
                        && x2 != x3
                        && x2 != x4
                        && x3 != x4;
                    if distinct
                        && x1 ^ x2 ^ x3 ^ x4 == 0
                        && v[x1 as usize] ^ v[x2 as usize] ^ v[x3 as usize] ^ v[x4 as usize] == 0
                    {
                        apn = Some(ApnWitness { quad: [x1, x2, x3, x4] });
                        break 'apn;
                    }
                }
            }
        }
    }

    let mut deriv = None;
    'deriv: for a in 1..q {
        for x1 in 0..q {
            for x2 in 0..q {
                for x3 in 0..q {
                    let s = v[x1 as usize]
                        ^ v[(x1 ^ a) as usize]
                        ^ v[x2 as usize]
                        ^ v[(x2 ^ a) as usize]
                        ^ v[x3 as usize]
                        ^ v[(x3 ^ a) as usize];
                    if s == 0 {
                        deriv = Some(DerivativeWitness { xs: [x1, x2, x3], a });
                        break 'deriv;
                    }
                }
            }
        }
    }

    Ok(CrookedVerdict {
        maps_zero_to_zero: table.value(0) == 0,
        apn_violation: apn,
        derivative_violation: deriv,
    })
}

/// Re-checks an APN witness against the table using only lookups and XOR.
pub fn verify_apn_witness(table: &FunctionTable, w: &ApnWitness) -> bool {
    let [x1, x2, x3, x4] = w.quad;
    let q = table.domain_size() as u32;
    let distinct =
        x1 != x2 && x1 != x3 && x1 != x4 && x2 != x3 && x2 != x4 && x3 != x4;
    distinct
        && [x1, x2, x3, x4].iter().all(|&x| x < q)
        && x1 ^ x2 ^ x3 ^ x4 == 0
        && table.value(x1) ^ table.value(x2) ^ table.value(x3) ^ table.value(x4) == 0
}

/// Re-checks a derivative-triple witness against the table.
pub fn verify_derivative_witness(table: &FunctionTable, w: &DerivativeWitness) -> bool {
    let q = table.domain_size() as u32;
    if w.a == 0 || w.a >= q || w.xs.iter().any(|&x| x >= q) {
        return false;
    }
    let d = |x: u32| table.value(x) ^ table.value(x ^ w.a);
    d(w.xs[0]) ^ d(w.xs[1]) ^ d(w.xs[2]) == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;

    fn power(n: u32, d: u64) -> FunctionTable {
        FunctionTable::power_map(&FieldCtx::new(n).unwrap(), d)
    }

    #[test]
    fn power_map_fixes_zero_and_one() {
        let t = power(3, 3);
        assert_eq!(t.value(0), 0);
        assert_eq!(t.value(1), 1);
    }

    #[test]
    fn power_map_matches_repeated_multiplication() {
        for (n, d) in [(5u32, 3u64), (7, 9)] {
            let ctx = FieldCtx::new(n).unwrap();
            let t = FunctionTable::power_map(&ctx, d);
            for x in ctx.elements() {
                let mut acc = Gf2Elem::ONE;
                for _ in 0..d {
                    acc = ctx.mul(acc, x);
                }
                assert_eq!(t.value(x.bits()), acc.bits(), "n={n} d={d} x={x}");
            }
        }
    }

    #[test]
    fn cube_is_apn_for_degree_3() {
        assert_eq!(apn_violation(&power(3, 3)), None);
    }

    #[test]
    fn identity_map_fails_apn_with_least_witness() {
        let t = FunctionTable::new(3, (0..8).collect()).unwrap();
        let w = apn_violation(&t).expect("linear maps are never APN past q=2");
        assert_eq!(w.quad, [0, 1, 2, 3]);
        assert!(verify_apn_witness(&t, &w));
    }

    #[test]
    fn cube_is_apn_for_degree_4() {
        let t = power(4, 3);
        assert_eq!(apn_violation(&t), None);
        // Independent confirmation via the literal quadruple enumeration.
        assert_eq!(is_crooked_naive(&t).unwrap().apn_violation, None);
    }

    #[test]
    fn cube_passes_derivative_condition_for_degree_3() {
        assert_eq!(derivative_violation(&power(3, 3)), None);
    }

    #[test]
    fn constant_zero_fails_derivative_condition() {
        let t = FunctionTable::new(3, vec![0; 8]).unwrap();
        let w = derivative_violation(&t).unwrap();
        assert_eq!((w.xs, w.a), ([0, 0, 0], 1));
        assert!(verify_derivative_witness(&t, &w));
    }

    #[test]
    fn cube_fails_derivative_condition_for_degree_2() {
        // Frozen from the naive oracle: least violation under (a, x1, x2, x3).
        let t = power(2, 3);
        let w = derivative_violation(&t).unwrap();
        assert_eq!((w.xs, w.a), ([0, 0, 2], 1));
        assert_eq!(
            is_crooked_naive(&t).unwrap().derivative_violation,
            Some(w)
        );
    }

    #[test]
    fn cube_is_crooked_for_degree_3() {
        assert!(is_crooked(&power(3, 3)).passes());
    }

    #[test]
    fn cube_fails_only_the_derivative_condition_for_degree_4() {
        let v = is_crooked(&power(4, 3));
        assert!(v.maps_zero_to_zero);
        assert_eq!(v.apn_violation, None);
        let w = v.derivative_violation.expect("even degree cannot be crooked");
        assert_eq!((w.xs, w.a), ([0, 0, 6], 1));
        assert!(!v.passes());
    }

    #[test]
    fn nonzero_at_zero_fails_condition_1() {
        let mut values: Vec<u32> = (0..8).collect();
        values[0] = 5;
        values[5] = 0; // keep it a permutation
        let v = is_crooked(&FunctionTable::new(3, values).unwrap());
        assert!(!v.maps_zero_to_zero);
        assert!(!v.passes());
    }

    #[test]
    fn naive_agrees_on_all_functions_of_degree_1_and_2() {
        // Degree 1 has 4 tables, degree 2 has 256; enumerate them all.
        for n in [1u32, 2] {
            let q = 1usize << n;
            let count = (q as u64).pow(q as u32);
            for code in 0..count {
                let mut c = code;
                let mut values = Vec::with_capacity(q);
                for _ in 0..q {
                    values.push((c % q as u64) as u32);
                    c /= q as u64;
                }
                let t = FunctionTable::new(n, values).unwrap();
                let fast = is_crooked(&t);
                let naive = is_crooked_naive(&t).unwrap();
                assert_eq!(fast, naive, "n={n} code={code}");
            }
        }
    }

    #[test]
    fn naive_agrees_on_all_power_maps_up_to_degree_5() {
        for n in 1..=5u32 {
            let q = 1u64 << n;
            for d in 1..=q.saturating_sub(2).max(1) {
                let t = power(n, d);
                let fast = is_crooked(&t);
                let naive = is_crooked_naive(&t).unwrap();
                assert_eq!(fast, naive, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn gold_maps_are_crooked_for_odd_degrees() {
        for n in [3u32, 5, 7, 9] {
            for k in 1..n {
                if gcd(k, n) != 1 {
                    continue;
                }
                let d = (1u64 << k) + 1;
                let t = power(n, d);
                assert!(is_crooked(&t).passes(), "x^{d} over degree {n}");
            }
        }
    }

    #[test]
    fn cube_is_not_crooked_for_even_degrees() {
        for n in [2u32, 4] {
            assert!(!is_crooked(&power(n, 3)).passes(), "n={n}");
        }
    }

    #[test]
    fn failure_witnesses_verify_against_the_table() {
        for n in 1..=5u32 {
            let q = 1u64 << n;
            for d in 1..q.max(2) {
                let t = power(n, d);
                let v = is_crooked(&t);
                if let Some(w) = &v.apn_violation {
                    assert!(verify_apn_witness(&t, w), "n={n} d={d}");
                }
                if let Some(w) = &v.derivative_violation {
                    assert!(verify_derivative_witness(&t, w), "n={n} d={d}");
                }
            }
        }
    }

    #[test]
    fn naive_rejects_large_degrees() {
        let t = power(6, 3);
        assert_eq!(is_crooked_naive(&t), Err(CrookedError::NaiveTooLarge(6)));
    }

    #[test]
    fn text_round_trip() {
        let t = power(3, 3);
        let text = t.to_text();
        assert!(text.starts_with("3\n0\n1\n"));
        assert_eq!(FunctionTable::from_text(&text).unwrap(), t);
    }

    #[test]
    fn text_parse_rejects_malformed_input() {
        assert!(FunctionTable::from_text("").is_err());
        assert!(FunctionTable::from_text("3\n0\n1").is_err()); // too short
        assert!(FunctionTable::from_text("1\n0\nbananas\n").is_err());
        assert!(FunctionTable::from_text("1\n0\n9\n").is_err()); // out of range
    }

    #[test]
    fn new_validates_length_and_range() {
        assert_eq!(
            FunctionTable::new(3, vec![0; 7]),
            Err(CrookedError::WrongLength { expected: 8, got: 7 })
        );
        assert_eq!(
            FunctionTable::new(2, vec![0, 1, 4, 1]),
            Err(CrookedError::ValueOutOfRange { index: 2, value: 4, n: 2 })
        );
        assert_eq!(
            FunctionTable::new(0, vec![]),
            Err(CrookedError::DegreeOutOfRange(0))
        );
    }

    fn gcd(a: u32, b: u32) -> u32 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
}
