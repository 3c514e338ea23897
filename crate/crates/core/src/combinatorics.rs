//! Decentralized coded-caching bookkeeping.
//!
//! Every user caches an independent, uniformly random `m`-fraction of every
//! file. In the large-file regime the sub-file of a file cached by exactly the
//! user set `S` has `m^|S| (1-m)^(K-|S|) F` bits. Combining one demand from
//! each user of a set `J` feeds, for every `I ⊆ J`, the codeword queue of `I`
//! with the XOR of the sub-files that the users of `I` still miss and the
//! other members of `J` already hold (sub-files cached outside `J` are
//! aggregated into the same queue).
//!
//! All quantities are real-valued; nothing is rounded to whole bits.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Largest supported user count. Subset enumeration is `2^K` and routing
/// scans `3^K` (set, subset) pairs per slot.
pub const MAX_USERS: usize = 16;

/// A nonempty set of users encoded as a bitmask (bit `k` set means user `k`,
/// zero-based, belongs to the set).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubsetId(u32);

impl SubsetId {
    pub fn new(mask: u32) -> Result<Self> {
        if mask == 0 {
            return domain("subset mask must be nonzero");
        }
        if mask >> MAX_USERS != 0 {
            return domain(format!("subset mask {mask:#b} exceeds {MAX_USERS} users"));
        }
        Ok(SubsetId(mask))
    }

    /// Builds a subset from zero-based user indices.
    pub fn from_users(users: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        for &k in users {
            if k >= MAX_USERS {
                return domain(format!("user index {k} exceeds {MAX_USERS} users"));
            }
            mask |= 1 << k;
        }
        SubsetId::new(mask)
    }

    /// Single-user subset `{k}`.
    pub fn singleton(k: usize) -> Self {
        debug_assert!(k < MAX_USERS);
        SubsetId(1 << k)
    }

    /// All `K` users.
    pub fn full(users: usize) -> Self {
        debug_assert!((1..=MAX_USERS).contains(&users));
        SubsetId(((1u64 << users) - 1) as u32)
    }

    #[inline]
    pub fn mask(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Cardinality.
    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Always false: subsets are nonempty by construction.
    #[inline]
    pub fn is_empty(self) -> bool {
        false
    }

    #[inline]
    pub fn contains(self, user: usize) -> bool {
        user < 32 && self.0 & (1 << user) != 0
    }

    #[inline]
    pub fn is_subset_of(self, other: SubsetId) -> bool {
        self.0 & !other.0 == 0
    }

    /// Member users in ascending order.
    pub fn users(self) -> impl Iterator<Item = usize> {
        let mask = self.0;
        (0..32).filter(move |k| mask & (1 << k) != 0)
    }

    /// Every nonempty subset of `self`, in descending mask order.
    pub fn subsets(self) -> Submasks {
        Submasks {
            full: self.0,
            next: self.0,
        }
    }
}

impl fmt::Display for SubsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (n, k) in self.users().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", k + 1)?;
        }
        f.write_str("}")
    }
}

/// Iterator over the nonempty submasks of a mask.
#[derive(Clone, Debug)]
pub struct Submasks {
    full: u32,
    next: u32,
}

impl Iterator for Submasks {
    type Item = SubsetId;

    fn next(&mut self) -> Option<SubsetId> {
        if self.next == 0 {
            return None;
        }
        let cur = self.next;
        self.next = (cur - 1) & self.full;
        Some(SubsetId(cur))
    }
}

/// Cache dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheParams {
    pub users: usize,
    pub memory: f64,
    pub file_bits: f64,
}

impl CacheParams {
    pub fn new(users: usize, memory: f64, file_bits: f64) -> Result<Self> {
        let p = CacheParams {
            users,
            memory,
            file_bits,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.users == 0 {
            return domain("at least one user is required");
        }
        if !(0.0..=1.0).contains(&self.memory) {
            return domain(format!("normalized memory {} not in [0, 1]", self.memory));
        }
        if !(self.file_bits > 0.0 && self.file_bits.is_finite()) {
            return domain(format!("file size {} must be positive", self.file_bits));
        }
        Ok(())
    }

    /// Bits a user still needs to reconstruct one requested file.
    pub fn missing_bits(&self) -> f64 {
        (1.0 - self.memory) * self.file_bits
    }
}

/// Size in bits of the sub-file cached by exactly `cached_by` users.
pub fn subfile_size(cached_by: usize, params: &CacheParams) -> Result<f64> {
    if cached_by > params.users {
        return domain(format!(
            "subset cardinality {cached_by} exceeds user count {}",
            params.users
        ));
    }
    let m = params.memory;
    Ok(m.powi(cached_by as i32) * (1.0 - m).powi((params.users - cached_by) as i32) * params.file_bits)
}

/// Bits entering the codeword queue of a receiver set of size `receivers`
/// for each combination over a demand set of size `combined`.
///
/// `m^(i-1) (1-m)^(j-i+1) F`: summing over the receiver sets that contain a
/// given user of the demand set yields exactly that user's `(1-m) F` missing
/// bits.
pub fn codeword_bits(combined: usize, receivers: usize, params: &CacheParams) -> Result<f64> {
    if receivers < 1 || receivers > combined {
        return domain(format!(
            "receiver set size {receivers} must lie in [1, {combined}]"
        ));
    }
    if combined > params.users {
        return domain(format!(
            "demand set size {combined} exceeds user count {}",
            params.users
        ));
    }
    let m = params.memory;
    Ok(m.powi(receivers as i32 - 1)
        * (1.0 - m).powi((combined - receivers + 1) as i32)
        * params.file_bits)
}

/// Files' worth of multicast needed by standard decentralized coded caching to
/// serve one demand per user: `(1-m)/m (1 - (1-m)^K)`, with the limit `K` at
/// `m = 0`.
pub fn standard_cc_load(users: usize, memory: f64) -> f64 {
    if memory <= 0.0 {
        return users as f64;
    }
    let q = 1.0 - memory;
    q / memory * (1.0 - q.powi(users as i32))
}

/// All nonempty subsets of `K` users in ascending mask order.
pub fn enumerate_subsets(users: usize) -> Result<Vec<SubsetId>> {
    check_user_count(users)?;
    Ok((1..(1u32 << users)).map(SubsetId).collect())
}

pub(crate) fn check_user_count(users: usize) -> Result<()> {
    if users == 0 || users > MAX_USERS {
        return crate::error::config(format!(
            "user count {users} outside supported range [1, {MAX_USERS}]"
        ));
    }
    Ok(())
}

/// `codeword_bits` tabulated by (demand set size, receiver set size).
#[derive(Clone, Debug)]
pub struct CodewordTable {
    users: usize,
    bits: Vec<f64>,
}

impl CodewordTable {
    pub fn new(params: &CacheParams) -> Result<Self> {
        check_user_count(params.users)?;
        let k = params.users;
        let mut bits = vec![0.0; (k + 1) * (k + 1)];
        for j in 1..=k {
            for i in 1..=j {
                bits[j * (k + 1) + i] = codeword_bits(j, i, params)?;
            }
        }
        Ok(CodewordTable { users: k, bits })
    }

    #[inline]
    pub fn get(&self, combined: usize, receivers: usize) -> f64 {
        self.bits[combined * (self.users + 1) + receivers]
    }

    /// Bits for the pair (demand set `j`, receiver set `i ⊆ j`).
    #[inline]
    pub fn for_pair(&self, combined: SubsetId, receivers: SubsetId) -> f64 {
        debug_assert!(receivers.is_subset_of(combined));
        self.get(combined.len(), receivers.len())
    }

    pub fn users(&self) -> usize {
        self.users
    }
}

/// Binomial coefficient as a float (exact for the ranges used here).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(k: usize, m: f64) -> CacheParams {
        CacheParams::new(k, m, 1000.0).unwrap()
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
    }

    // Independent oracle: walk every sub-file of the user's requested file and
    // attribute it to the receiver set it lands in when combining over `j`.
    fn bits_by_enumeration(k: usize, m: f64, j: u32, i: u32, user: usize) -> f64 {
        let p = params(k, m);
        let mut total = 0.0;
        for cached in 0u32..(1 << k) {
            if cached & (1 << user) != 0 {
                continue;
            }
            if (cached & j) | (1 << user) == i {
                total += subfile_size(cached.count_ones() as usize, &p).unwrap();
            }
        }
        total
    }

    #[test]
    fn subfile_examples() {
        let p = params(3, 0.6);
        assert!(rel_close(subfile_size(0, &p).unwrap(), 64.0, 1e-12));
        assert!(rel_close(subfile_size(1, &p).unwrap(), 96.0, 1e-12));
        let full = CacheParams::new(4, 1.0, 1000.0).unwrap();
        assert_eq!(subfile_size(4, &full).unwrap(), 1000.0);
        assert!(matches!(subfile_size(4, &p), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn subfiles_partition_file() {
        let p = params(3, 0.6);
        let total: f64 = (0u32..8)
            .map(|s| subfile_size(s.count_ones() as usize, &p).unwrap())
            .sum();
        assert!(rel_close(total, 1000.0, 1e-12));
    }

    #[test]
    fn codeword_examples_match_worked_table() {
        let p = params(3, 0.6);
        // Q_{12} after combining {1,2}: E1^D2 and E13^D23
        assert!(rel_close(codeword_bits(2, 2, &p).unwrap(), 240.0, 1e-12));
        assert!(rel_close(bits_by_enumeration(3, 0.6, 0b011, 0b011, 0), 240.0, 1e-12));
        // Q_{1} after combining {1,2}: D_empty and D_3
        assert!(rel_close(codeword_bits(2, 1, &p).unwrap(), 160.0, 1e-12));
        assert!(rel_close(bits_by_enumeration(3, 0.6, 0b011, 0b001, 0), 160.0, 1e-12));
        // uncoded: the whole missing part of the file
        assert!(rel_close(codeword_bits(1, 1, &p).unwrap(), 400.0, 1e-12));
        let none = CacheParams::new(3, 0.0, 1000.0).unwrap();
        assert_eq!(codeword_bits(1, 1, &none).unwrap(), 1000.0);
    }

    #[test]
    fn codeword_bits_domain() {
        let p = params(3, 0.6);
        assert!(codeword_bits(2, 3, &p).is_err());
        assert!(codeword_bits(2, 0, &p).is_err());
        assert!(codeword_bits(4, 1, &p).is_err());
    }

    #[test]
    fn codeword_bits_match_enumeration() {
        for k in 1..=5 {
            for &m in &[0.1, 0.35, 0.6, 0.9] {
                let p = params(k, m);
                for j in 1u32..(1 << k) {
                    let user = j.trailing_zeros() as usize;
                    let mut sub = j;
                    while sub != 0 {
                        if sub & (1 << user) != 0 {
                            let want = bits_by_enumeration(k, m, j, sub, user);
                            let got = codeword_bits(
                                j.count_ones() as usize,
                                sub.count_ones() as usize,
                                &p,
                            )
                            .unwrap();
                            assert!(rel_close(got, want, 1e-12), "k={k} m={m} j={j:b} i={sub:b}");
                        }
                        sub = (sub - 1) & j;
                    }
                }
            }
        }
    }

    #[test]
    fn standard_load_examples() {
        assert!(rel_close(standard_cc_load(3, 0.6), 0.624, 1e-12));
        for &m in &[0.1, 0.5, 0.9] {
            assert!(rel_close(standard_cc_load(1, m), 1.0 - m, 1e-12));
        }
        assert!(rel_close(standard_cc_load(200, 0.6), 2.0 / 3.0, 1e-12));
        assert_eq!(standard_cc_load(5, 0.0), 5.0);
        // continuity towards the m = 0 limit
        assert!((standard_cc_load(5, 1e-9) - 5.0).abs() < 1e-6);
    }

    #[test]
    fn subset_enumeration() {
        let two = enumerate_subsets(2).unwrap();
        assert_eq!(two.iter().map(|s| s.mask()).collect::<Vec<_>>(), vec![0b01, 0b10, 0b11]);
        assert_eq!(enumerate_subsets(1).unwrap(), vec![SubsetId::new(1).unwrap()]);
        assert_eq!(enumerate_subsets(3).unwrap().len(), 7);
        assert!(matches!(enumerate_subsets(17), Err(crate::Error::Config(_))));
        assert!(enumerate_subsets(0).is_err());
    }

    #[test]
    fn subset_helpers() {
        let s = SubsetId::from_users(&[0, 2]).unwrap();
        assert_eq!(s.mask(), 0b101);
        assert_eq!(s.len(), 2);
        assert!(s.contains(2) && !s.contains(1));
        assert_eq!(s.users().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(s.to_string(), "{1,3}");
        let subs: Vec<u32> = s.subsets().map(|x| x.mask()).collect();
        assert_eq!(subs, vec![0b101, 0b100, 0b001]);
        assert!(SubsetId::new(0).is_err());
        assert_eq!(SubsetId::full(3).mask(), 0b111);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(12, 6), 924.0);
        assert_eq!(binomial(3, 4), 0.0);
    }
}
