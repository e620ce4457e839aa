//! Token universes and token sets.
//!
//! A universe fixes a finite alphabet of distinct names; everything else in
//! the crate works with bitsets over that alphabet. Token ids are positions
//! in the lexicographically sorted name list, so id order is name order and
//! every observable listing is deterministic.

use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

use crate::error::Error;

/// Index of a token within its universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TokenId(pub u32);

impl TokenId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Characters that the text format reserves for structure; names may use
/// anything else that is printable and non-whitespace, so generated names
/// like `[a,b]` stay loadable.
pub(crate) fn valid_token_name(name: &str) -> bool {
    !name.is_empty()
        && !name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '{' | '}' | '#' | ':' | '|'))
}

/// Finite, lexicographically sorted set of distinct token names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenUniverse {
    names: Vec<String>,
}

impl TokenUniverse {
    pub fn new<I, S>(names: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut names: Vec<String> = names.into_iter().map(Into::into).collect();
        for name in &names {
            if !valid_token_name(name) {
                return Err(Error::InvalidTokenName { name: name.clone() });
            }
        }
        names.sort();
        if let Some(pair) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateToken {
                name: pair[0].clone(),
            });
        }
        if names.len() > u32::MAX as usize {
            return Err(Error::InvalidTokenName {
                name: "(universe too large)".into(),
            });
        }
        Ok(TokenUniverse { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn id(&self, name: &str) -> Option<TokenId> {
        self.names
            .binary_search_by(|n| n.as_str().cmp(name))
            .ok()
            .map(|i| TokenId(i as u32))
    }

    pub fn name(&self, id: TokenId) -> &str {
        &self.names[id.index()]
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn ids(&self) -> impl Iterator<Item = TokenId> {
        (0..self.names.len() as u32).map(TokenId)
    }

    pub fn empty_set(&self) -> TokenSet {
        TokenSet::empty(self.len())
    }

    pub fn full_set(&self) -> TokenSet {
        let mut s = self.empty_set();
        for id in self.ids() {
            s.insert(id);
        }
        s
    }

    pub fn singleton(&self, id: TokenId) -> TokenSet {
        let mut s = self.empty_set();
        s.insert(id);
        s
    }

    pub fn set_of(&self, ids: impl IntoIterator<Item = TokenId>) -> TokenSet {
        let mut s = self.empty_set();
        for id in ids {
            debug_assert!(id.index() < self.len());
            s.insert(id);
        }
        s
    }

    pub fn set_from_names<'a>(
        &self,
        names: impl IntoIterator<Item = &'a str>,
    ) -> Result<TokenSet, Error> {
        let mut s = self.empty_set();
        for name in names {
            let id = self.id(name).ok_or_else(|| Error::UnknownToken {
                name: name.to_string(),
            })?;
            s.insert(id);
        }
        Ok(s)
    }

    /// Renders a set as `{a b}` with members in name order.
    pub fn render_set(&self, set: &TokenSet) -> String {
        let mut out = String::from("{");
        let mut first = true;
        for id in set.iter() {
            if !first {
                out.push(' ');
            }
            out.push_str(self.name(id));
            first = false;
        }
        out.push('}');
        out
    }

    pub fn set_names(&self, set: &TokenSet) -> Vec<String> {
        set.iter().map(|id| self.name(id).to_string()).collect()
    }
}

const WORD_BITS: usize = 64;

fn words_for(tokens: usize) -> usize {
    tokens.div_ceil(WORD_BITS)
}

/// Bitset of tokens. All sets over one universe carry the same word count, so
/// equality and hashing are plain word comparisons. The `Ord` instance is the
/// canonical listing order used everywhere output is sorted: smaller sets
/// first, ties broken by the smallest distinguishing member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TokenSet {
    words: SmallVec<[u64; 2]>,
}

impl TokenSet {
    pub fn empty(tokens: usize) -> Self {
        TokenSet {
            words: smallvec::smallvec![0; words_for(tokens)],
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn contains(&self, id: TokenId) -> bool {
        let i = id.index();
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    pub fn insert(&mut self, id: TokenId) {
        let i = id.index();
        self.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
    }

    pub fn remove(&mut self, id: TokenId) {
        let i = id.index();
        self.words[i / WORD_BITS] &= !(1 << (i % WORD_BITS));
    }

    pub fn union_with(&mut self, other: &TokenSet) {
        debug_assert_eq!(self.words.len(), other.words.len());
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    pub fn union(&self, other: &TokenSet) -> TokenSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersect(&self, other: &TokenSet) -> TokenSet {
        let mut out = self.clone();
        for (w, o) in out.words.iter_mut().zip(&other.words) {
            *w &= o;
        }
        out
    }

    pub fn difference(&self, other: &TokenSet) -> TokenSet {
        let mut out = self.clone();
        for (w, o) in out.words.iter_mut().zip(&other.words) {
            *w &= !o;
        }
        out
    }

    pub fn with(&self, id: TokenId) -> TokenSet {
        let mut out = self.clone();
        out.insert(id);
        out
    }

    pub fn is_subset(&self, other: &TokenSet) -> bool {
        debug_assert_eq!(self.words.len(), other.words.len());
        self.words
            .iter()
            .zip(&other.words)
            .all(|(w, o)| w & !o == 0)
    }

    pub fn is_disjoint(&self, other: &TokenSet) -> bool {
        self.words.iter().zip(&other.words).all(|(w, o)| w & o == 0)
    }

    /// All subsets, in no particular order. Callers keep the member count
    /// at desk scale; the iterator is 2^len long.
    pub fn subsets(&self) -> impl Iterator<Item = TokenSet> + '_ {
        let members: Vec<TokenId> = self.iter().collect();
        debug_assert!(members.len() < 32);
        let mut empty = self.clone();
        for w in empty.words.iter_mut() {
            *w = 0;
        }
        (0u64..(1u64 << members.len())).map(move |mask| {
            let mut s = empty.clone();
            for (i, &id) in members.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    s.insert(id);
                }
            }
            s
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = TokenId> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros();
                    bits &= bits - 1;
                    Some(TokenId((wi * WORD_BITS) as u32 + b))
                }
            })
        })
    }

    fn lowest_diff(&self, other: &TokenSet) -> Option<TokenId> {
        for (wi, (w, o)) in self.words.iter().zip(&other.words).enumerate() {
            let d = w ^ o;
            if d != 0 {
                return Some(TokenId((wi * WORD_BITS) as u32 + d.trailing_zeros()));
            }
        }
        None
    }
}

impl PartialOrd for TokenSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TokenSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            match self.lowest_diff(other) {
                // Owning the smallest distinguishing member puts the earlier
                // name first, matching sorted member-list comparison.
                Some(id) => {
                    if self.contains(id) {
                        Ordering::Less
                    } else {
                        Ordering::Greater
                    }
                }
                None => Ordering::Equal,
            }
        })
    }
}

impl fmt::Display for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn universe(names: &[&str]) -> TokenUniverse {
        TokenUniverse::new(names.iter().copied()).unwrap()
    }

    #[test]
    fn names_are_sorted_and_ids_follow() {
        let u = universe(&["c", "a", "b"]);
        assert_eq!(u.names().collect::<Vec<_>>(), ["a", "b", "c"]);
        assert_eq!(u.id("b"), Some(TokenId(1)));
        assert_eq!(u.name(TokenId(2)), "c");
    }

    #[test]
    fn duplicate_and_invalid_names_rejected() {
        assert!(TokenUniverse::new(["a", "a"]).is_err());
        assert!(TokenUniverse::new(["a b"]).is_err());
        assert!(TokenUniverse::new([""]).is_err());
        assert!(TokenUniverse::new(["x:y"]).is_err());
        assert!(TokenUniverse::new(["|-"]).is_err());
        assert!(TokenUniverse::new(["[a,b]"]).is_ok());
    }

    #[test]
    fn set_operations() {
        let u = universe(&["a", "b", "c"]);
        let ab = u.set_from_names(["a", "b"]).unwrap();
        let bc = u.set_from_names(["b", "c"]).unwrap();
        assert_eq!(u.render_set(&ab.union(&bc)), "{a b c}");
        assert_eq!(u.render_set(&ab.intersect(&bc)), "{b}");
        assert_eq!(u.render_set(&ab.difference(&bc)), "{a}");
        assert!(ab.intersect(&bc).is_subset(&ab));
        assert!(!ab.is_subset(&bc));
        assert_eq!(ab.len(), 2);
    }

    #[test]
    fn canonical_order_is_size_then_lex() {
        let u = universe(&["a", "b", "c"]);
        let mut sets: Vec<TokenSet> = vec![
            u.set_from_names(["a", "b"]).unwrap(),
            u.set_from_names(["c"]).unwrap(),
            u.empty_set(),
            u.set_from_names(["a", "c"]).unwrap(),
            u.set_from_names(["b", "c"]).unwrap(),
            u.set_from_names(["a"]).unwrap(),
        ];
        sets.sort();
        let rendered: Vec<String> = sets.iter().map(|s| u.render_set(s)).collect();
        assert_eq!(rendered, ["{}", "{a}", "{c}", "{a b}", "{a c}", "{b c}"]);
    }

    #[test]
    fn empty_universe_is_workable() {
        let u = TokenUniverse::new(Vec::<String>::new()).unwrap();
        assert!(u.is_empty());
        let s = u.empty_set();
        assert!(s.is_empty());
        assert_eq!(u.render_set(&s), "{}");
    }
}
