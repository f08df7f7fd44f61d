//! Integer sequences that parameterise the compact models: radix bases,
//! cyclic orders, and the index rule `n_k` of the p-adic characters.

use num_bigint::BigUint;
use num_traits::One;

/// Bound on index searches over rule-described sequences.
pub(crate) const SEARCH_LIMIT: usize = 1 << 16;

/// A rule for a sequence of positive integers `a_0, a_1, ...`.
///
/// Every rule kind is non-decreasing past its explicit prefix, which is what
/// lets the predicates below be decided symbolically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BaseSequence {
    /// `a_n = start + n * step`.
    Arithmetic { start: u64, step: u64 },
    /// `a_n = start * ratio^n`.
    Geometric { start: u64, ratio: u64 },
    /// `a_n = prod_{k <= n} inner_k`.
    FactorialProduct(Box<BaseSequence>),
    /// `a_n = terms[n]` for `n < terms.len()`, then `tail` at the same absolute index.
    Explicit { terms: Vec<u64>, tail: Box<BaseSequence> },
}

impl BaseSequence {
    pub fn arith(start: u64, step: u64) -> Self {
        BaseSequence::Arithmetic { start, step }
    }

    pub fn geom(start: u64, ratio: u64) -> Self {
        BaseSequence::Geometric { start, ratio }
    }

    pub fn term(&self, n: usize) -> BigUint {
        match self {
            BaseSequence::Arithmetic { start, step } => {
                BigUint::from(*start) + BigUint::from(*step) * BigUint::from(n)
            }
            BaseSequence::Geometric { start, ratio } => {
                BigUint::from(*start) * BigUint::from(*ratio).pow(n as u32)
            }
            BaseSequence::FactorialProduct(inner) => {
                (0..=n).fold(BigUint::one(), |acc, k| acc * inner.term(k))
            }
            BaseSequence::Explicit { terms, tail } => match terms.get(n) {
                Some(t) => BigUint::from(*t),
                None => tail.term(n),
            },
        }
    }

    /// The first `count` terms.
    pub fn terms(&self, count: usize) -> Vec<BigUint> {
        match self {
            BaseSequence::FactorialProduct(inner) => {
                let mut acc = BigUint::one();
                inner
                    .terms(count)
                    .into_iter()
                    .map(|t| {
                        acc *= t;
                        acc.clone()
                    })
                    .collect()
            }
            _ => (0..count).map(|n| self.term(n)).collect(),
        }
    }

    /// `u_n = prod_{k <= n} a_k` for `n < count`.
    pub fn partial_products(&self, count: usize) -> Vec<BigUint> {
        BaseSequence::FactorialProduct(Box::new(self.clone())).terms(count)
    }

    fn is_valid_rule(&self) -> bool {
        match self {
            BaseSequence::Arithmetic { .. } => true,
            BaseSequence::Geometric { ratio, .. } => *ratio >= 1,
            BaseSequence::FactorialProduct(inner) => {
                inner.is_valid_rule() && inner.min_from(0) >= BigUint::one()
            }
            BaseSequence::Explicit { tail, .. } => tail.is_valid_rule(),
        }
    }

    /// `min_{m >= n} a_m`.
    pub fn min_from(&self, n: usize) -> BigUint {
        match self {
            BaseSequence::Explicit { terms, tail } => {
                let tail_min = tail.min_from(n.max(terms.len()));
                terms
                    .iter()
                    .skip(n)
                    .map(|&t| BigUint::from(t))
                    .fold(tail_min, |m, t| m.min(t))
            }
            _ => self.term(n),
        }
    }

    /// Every term is at least `bound`.
    pub fn all_at_least(&self, bound: u64) -> bool {
        self.is_valid_rule() && self.min_from(0) >= BigUint::from(bound)
    }

    /// `a_n < a_{n+1} < ...` from index `n` on.
    pub fn strictly_increasing_from(&self, n: usize) -> bool {
        match self {
            BaseSequence::Arithmetic { step, .. } => *step >= 1,
            BaseSequence::Geometric { start, ratio } => *start >= 1 && *ratio >= 2,
            BaseSequence::FactorialProduct(inner) => {
                inner.is_valid_rule() && inner.min_from(n + 1) >= BigUint::from(2u8)
            }
            BaseSequence::Explicit { terms, tail } => {
                if n >= terms.len() {
                    return tail.strictly_increasing_from(n);
                }
                let list_ok = terms[n..].windows(2).all(|w| w[0] < w[1]);
                let boundary = BigUint::from(*terms.last().unwrap()) < tail.term(terms.len());
                list_ok && boundary && tail.strictly_increasing_from(terms.len())
            }
        }
    }

    /// `a_n -> infinity`.
    pub fn diverges(&self) -> bool {
        match self {
            BaseSequence::Arithmetic { step, .. } => *step >= 1,
            BaseSequence::Geometric { start, ratio } => *start >= 1 && *ratio >= 2,
            BaseSequence::FactorialProduct(inner) => {
                inner.is_valid_rule()
                    && inner.min_from(0) >= BigUint::one()
                    && (inner.diverges() || inner.min_from(0) >= BigUint::from(2u8))
            }
            BaseSequence::Explicit { tail, .. } => tail.diverges(),
        }
    }

    /// Admissible as the radix sequence of the circle: `a_n >= 2`, `a_n -> infinity`.
    pub fn is_torus_admissible(&self) -> bool {
        self.all_at_least(2) && self.diverges()
    }

    /// Admissible as cyclic orders of a product: `1 < b_0 < b_1 < ...`.
    pub fn is_product_admissible(&self) -> bool {
        self.all_at_least(2) && self.strictly_increasing_from(0)
    }
}

/// The strictly increasing index rule `n_0 < n_1 < ...` of a p-adic character sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IndexRule {
    /// `n_k = k^2`.
    Squares,
    /// `n_k = (k+1)(k+2)/2`, i.e. `1, 3, 6, 10, ...`.
    Triangular,
    Arithmetic { start: u64, step: u64 },
    Geometric { start: u64, ratio: u64 },
    Explicit { terms: Vec<u64>, tail: Box<IndexRule> },
}

impl IndexRule {
    /// `n_k`, or `None` on overflow.
    pub fn term(&self, k: usize) -> Option<u64> {
        let k64 = k as u64;
        match self {
            IndexRule::Squares => k64.checked_mul(k64),
            IndexRule::Triangular => (k64 + 1).checked_mul(k64 + 2).map(|v| v / 2),
            IndexRule::Arithmetic { start, step } => step.checked_mul(k64)?.checked_add(*start),
            IndexRule::Geometric { start, ratio } => {
                let p = ratio.checked_pow(u32::try_from(k).ok()?)?;
                start.checked_mul(p)
            }
            IndexRule::Explicit { terms, tail } => match terms.get(k) {
                Some(t) => Some(*t),
                None => tail.term(k),
            },
        }
    }

    /// `n_{k+1} - n_k`.
    pub fn gap(&self, k: usize) -> Option<u64> {
        self.term(k + 1)?.checked_sub(self.term(k)?)
    }

    pub fn strictly_increasing(&self) -> bool {
        match self {
            IndexRule::Squares | IndexRule::Triangular => true,
            IndexRule::Arithmetic { step, .. } => *step >= 1,
            IndexRule::Geometric { start, ratio } => *start >= 1 && *ratio >= 2,
            IndexRule::Explicit { terms, tail } => {
                let list_ok = terms.windows(2).all(|w| w[0] < w[1]);
                let boundary = match (terms.last(), tail.term(terms.len())) {
                    (Some(last), Some(next)) => *last < next,
                    (None, _) => true,
                    (Some(_), None) => false,
                };
                list_ok && boundary && tail.strictly_increasing()
            }
        }
    }

    /// `n_{k+1} - n_k -> infinity`.
    pub fn gaps_diverge(&self) -> bool {
        match self {
            IndexRule::Squares | IndexRule::Triangular => true,
            IndexRule::Arithmetic { .. } => false,
            IndexRule::Geometric { start, ratio } => *start >= 1 && *ratio >= 2,
            IndexRule::Explicit { tail, .. } => tail.gaps_diverge(),
        }
    }

    /// The gaps `n_{w+1} - n_w` are non-decreasing for `w >= k`.
    pub fn gaps_nondecreasing_from(&self, k: usize) -> bool {
        match self {
            IndexRule::Squares | IndexRule::Triangular | IndexRule::Arithmetic { .. } => true,
            IndexRule::Geometric { ratio, .. } => *ratio >= 1,
            IndexRule::Explicit { terms, tail } => {
                let len = terms.len();
                if k >= len {
                    return tail.gaps_nondecreasing_from(k);
                }
                // check explicitly through the seam, then defer to the tail
                let upto = len + 2;
                let gaps: Option<Vec<u64>> = (k..upto).map(|w| self.gap(w)).collect();
                match gaps {
                    Some(g) => g.windows(2).all(|w| w[0] <= w[1]) && tail.gaps_nondecreasing_from(len),
                    None => false,
                }
            }
        }
    }

    /// Smallest `w >= from` with `n_{v+1} - n_v > bound` for every `v >= w`.
    pub fn first_index_with_gaps_above(&self, bound: u64, from: usize) -> Option<usize> {
        let mut anchor = None;
        for w in from..from + SEARCH_LIMIT {
            if self.gap(w)? > bound && self.gaps_nondecreasing_from(w) {
                anchor = Some(w);
                break;
            }
        }
        let mut w = anchor?;
        while w > from && self.gap(w - 1)? > bound {
            w -= 1;
        }
        Some(w)
    }

    /// A period `M` with `n_{k+M} = n_k (mod modulus)` for every `k`, when the rule has one
    /// that can be stated in closed form.
    pub fn residue_period(&self, modulus: u64) -> Option<usize> {
        let m = usize::try_from(modulus).ok()?;
        match self {
            IndexRule::Squares | IndexRule::Arithmetic { .. } => Some(m),
            IndexRule::Triangular => Some(2 * m),
            IndexRule::Geometric { .. } | IndexRule::Explicit { .. } => None,
        }
    }

    /// Smallest `k` with `n_k >= target`.
    pub fn first_index_reaching(&self, target: u64) -> Option<usize> {
        (0..SEARCH_LIMIT * 16).find(|&k| self.term(k).map_or(true, |t| t >= target))
    }

    /// The first `count` terms, failing on overflow.
    pub fn terms(&self, count: usize) -> Option<Vec<u64>> {
        (0..count).map(|k| self.term(k)).collect()
    }

    pub fn constant_gap(&self) -> Option<u64> {
        match self {
            IndexRule::Arithmetic { step, .. } => Some(*step),
            IndexRule::Explicit { tail, .. } => tail.constant_gap(),
            _ => None,
        }
    }
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}
