//! One-sided binary sequences, stored exactly as a finite prefix followed by
//! a periodic tail.

use std::fmt;

use crate::error::{Error, Result};

/// An eventually periodic point of Σ₂.
///
/// The prefix is stored reversed so that prepending a symbol is a push.
#[derive(Clone, Debug)]
pub struct BinarySeq {
    rev_prefix: Vec<u8>,
    period: Vec<u8>,
}

impl BinarySeq {
    pub fn new(prefix: &[u8], period: &[u8]) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidParameter("Σ₂ tail period must be nonempty".into()));
        }
        if prefix.iter().chain(period).any(|&b| b > 1) {
            return Err(Error::InvalidParameter("Σ₂ symbols must be 0 or 1".into()));
        }
        Ok(Self {
            rev_prefix: prefix.iter().rev().copied().collect(),
            period: period.to_vec(),
        })
    }

    /// The constant sequence bbb…
    pub fn constant(bit: u8) -> Self {
        Self {
            rev_prefix: Vec::new(),
            period: vec![bit & 1],
        }
    }

    pub fn prefix_len(&self) -> usize {
        self.rev_prefix.len()
    }

    pub fn period(&self) -> &[u8] {
        &self.period
    }

    pub fn prefix(&self) -> Vec<u8> {
        self.rev_prefix.iter().rev().copied().collect()
    }

    /// Symbol at 0-based position `i`.
    pub fn get(&self, i: usize) -> u8 {
        let p = self.rev_prefix.len();
        if i < p {
            self.rev_prefix[p - 1 - i]
        } else {
            self.period[(i - p) % self.period.len()]
        }
    }

    /// `b s₀ s₁ …`
    pub fn prepend(&self, bit: u8) -> Self {
        let mut out = self.clone();
        out.rev_prefix.push(bit & 1);
        out
    }

    /// `s₁ s₂ …`, dropping the first symbol.
    pub fn shift(&self) -> Self {
        let mut out = self.clone();
        if out.rev_prefix.pop().is_none() {
            out.period.rotate_left(1);
        }
        out
    }

    /// First `n` symbols.
    pub fn take(&self, n: usize) -> Vec<u8> {
        (0..n).map(|i| self.get(i)).collect()
    }

    /// Returns a copy with the symbol at position `i` flipped.
    pub fn flip(&self, i: usize) -> Self {
        let mut prefix = self.take(i.max(self.prefix_len()) + 1);
        prefix[i] ^= 1;
        let p = prefix.len() - self.prefix_len();
        // keep the tail phase aligned with the original sequence
        let rot = p % self.period.len();
        let mut period = self.period.clone();
        period.rotate_left(rot);
        Self {
            rev_prefix: prefix.into_iter().rev().collect(),
            period,
        }
    }

    /// 0-based index of the first disagreement, `None` when the sequences are equal.
    pub fn first_disagreement(&self, other: &Self) -> Option<usize> {
        let bound = self.prefix_len().max(other.prefix_len()) + lcm(self.period.len(), other.period.len());
        (0..bound).find(|&i| self.get(i) != other.get(i))
    }

    /// Prefix and period as text, e.g. `01(10)`.
    pub fn encode(&self) -> String {
        let mut s: String = self.prefix().iter().map(|b| char::from(b'0' + b)).collect();
        s.push('(');
        s.extend(self.period.iter().map(|b| char::from(b'0' + b)));
        s.push(')');
        s
    }

    pub fn decode(text: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed Σ₂ point {text:?}"));
        let open = text.find('(').ok_or_else(bad)?;
        let tail = text[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let bits = |s: &str| -> Result<Vec<u8>> {
            s.bytes()
                .map(|c| match c {
                    b'0' => Ok(0),
                    b'1' => Ok(1),
                    _ => Err(bad()),
                })
                .collect()
        };
        Self::new(&bits(&text[..open])?, &bits(tail)?)
    }
}

impl PartialEq for BinarySeq {
    fn eq(&self, other: &Self) -> bool {
        self.first_disagreement(other).is_none()
    }
}

impl fmt::Display for BinarySeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}
