//! Token alphabet and the four string operations used to clean up a
//! per-timestep character stream: count, length, squeeze and delete.
//!
//! The alphabet has 29 symbols: the letters `a`..`z`, a word separator, an
//! apostrophe and an atomic unknown-sound marker. In text form tokens are
//! whitespace separated and written as `a`..`z`, `_`, `'` and `<unk>`.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// One symbol of the 29-token output alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token(u8);

impl Token {
    pub const SPACE: Token = Token(26);
    pub const APOSTROPHE: Token = Token(27);
    pub const UNK: Token = Token(28);
    pub const COUNT: usize = 29;

    /// Lowercase ASCII letter token. Uppercase input is folded.
    pub fn letter(c: char) -> Option<Token> {
        let c = c.to_ascii_lowercase();
        c.is_ascii_lowercase().then(|| Token(c as u8 - b'a'))
    }

    pub fn from_index(index: usize) -> Option<Token> {
        (index < Self::COUNT).then_some(Token(index as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn all() -> impl Iterator<Item = Token> {
        (0..Self::COUNT as u8).map(Token)
    }

    pub fn is_letter(self) -> bool {
        self.0 < 26
    }

    pub fn as_char(self) -> Option<char> {
        match self {
            Token::SPACE => Some(' '),
            Token::APOSTROPHE => Some('\''),
            Token::UNK => None,
            Token(i) => Some((b'a' + i) as char),
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Token::SPACE => f.write_str("_"),
            Token::APOSTROPHE => f.write_str("'"),
            Token::UNK => f.write_str("<unk>"),
            Token(i) => write!(f, "{}", (b'a' + i) as char),
        }
    }
}

impl FromStr for Token {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "<unk>" => Ok(Token::UNK),
            "_" => Ok(Token::SPACE),
            "'" => Ok(Token::APOSTROPHE),
            _ => {
                let mut chars = s.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) if c.is_ascii_lowercase() => Ok(Token(c as u8 - b'a')),
                    _ => Err(Error::InvalidToken(s.to_string())),
                }
            }
        }
    }
}

/// An ordered token sequence. Length counts tokens, so `<unk>` has length 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CharSeq(Vec<Token>);

impl CharSeq {
    pub fn new(tokens: Vec<Token>) -> Self {
        CharSeq(tokens)
    }

    /// Spell a word letter by letter. Spaces become the separator token.
    pub fn from_word(word: &str) -> Result<Self> {
        word.chars()
            .map(|c| match c {
                ' ' => Ok(Token::SPACE),
                '\'' => Ok(Token::APOSTROPHE),
                c => Token::letter(c).ok_or_else(|| Error::InvalidToken(c.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(CharSeq)
    }

    pub fn tokens(&self) -> &[Token] {
        &self.0
    }

    pub fn into_tokens(self) -> Vec<Token> {
        self.0
    }

    /// Compact spelling with `<unk>` kept and the separator shown as `_`.
    pub fn spelled(&self) -> String {
        self.0
            .iter()
            .map(|t| match t.as_char() {
                Some(' ') => "_".to_string(),
                Some(c) => c.to_string(),
                None => "<unk>".to_string(),
            })
            .collect()
    }
}

impl Deref for CharSeq {
    type Target = [Token];

    fn deref(&self) -> &[Token] {
        &self.0
    }
}

impl FromIterator<Token> for CharSeq {
    fn from_iter<I: IntoIterator<Item = Token>>(iter: I) -> Self {
        CharSeq(iter.into_iter().collect())
    }
}

impl FromStr for CharSeq {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<_>>>()
            .map(CharSeq)
    }
}

impl fmt::Display for CharSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl Serialize for CharSeq {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CharSeq {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Number of positions holding `p`.
pub fn count_pattern(s: &[Token], p: Token) -> usize {
    s.iter().filter(|&&t| t == p).count()
}

pub fn length(s: &[Token]) -> usize {
    s.len()
}

/// Collapse every run of identical adjacent tokens to a single token.
pub fn squeeze(s: &[Token]) -> CharSeq {
    let mut out: Vec<Token> = Vec::with_capacity(s.len());
    for &t in s {
        if out.last() != Some(&t) {
            out.push(t);
        }
    }
    CharSeq(out)
}

/// Remove every occurrence of `p`.
pub fn delete(s: &[Token], p: Token) -> CharSeq {
    s.iter().copied().filter(|&t| t != p).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE_INPUT: &str = "n a a _ t t t <unk> u u u _ r r r r <unk> e e <unk>";

    fn seq(s: &str) -> CharSeq {
        s.parse().unwrap()
    }

    #[test]
    fn alphabet_has_29_tokens() {
        let all: Vec<Token> = Token::all().collect();
        assert_eq!(all.len(), 29);
        let rendered: std::collections::BTreeSet<String> =
            all.iter().map(|t| t.to_string()).collect();
        assert_eq!(rendered.len(), 29);
        for t in all {
            assert_eq!(t.to_string().parse::<Token>().unwrap(), t);
        }
    }

    #[test]
    fn unk_is_one_token() {
        let s = seq("<unk>");
        assert_eq!(length(&s), 1);
        assert!("<".parse::<Token>().is_err());
        assert!("A".parse::<Token>().is_err());
        assert!("ab".parse::<Token>().is_err());
    }

    #[test]
    fn count_and_length_on_reference_stream() {
        let s = seq(TABLE_INPUT);
        assert_eq!(count_pattern(&s, Token::UNK), 3);
        assert_eq!(length(&s), 20);
        assert_eq!(count_pattern(&CharSeq::default(), Token::UNK), 0);
        assert_eq!(count_pattern(&seq("a a a"), Token::letter('a').unwrap()), 3);
        assert_eq!(length(&CharSeq::from_word("nature").unwrap()), 6);
    }

    #[test]
    fn squeeze_reference_stream() {
        let s = seq(TABLE_INPUT);
        assert_eq!(squeeze(&s), seq("n a _ t <unk> u _ r <unk> e <unk>"));
        assert_eq!(squeeze(&seq("a a b b a a")), seq("a b a"));
        let once = squeeze(&s);
        assert_eq!(squeeze(&once), once);
    }

    #[test]
    fn delete_reference_stream() {
        let s = seq(TABLE_INPUT);
        assert_eq!(
            delete(&s, Token::UNK),
            seq("n a a _ t t t u u u _ r r r r e e")
        );
        let plain = seq("a b c");
        assert_eq!(delete(&plain, Token::UNK), plain);
    }

    #[test]
    fn composite_rows_spell_nature() {
        let s = seq(TABLE_INPUT);
        let nature = CharSeq::from_word("nature").unwrap();
        let (u, sp) = (Token::UNK, Token::SPACE);
        assert_eq!(squeeze(&delete(&delete(&s, u), sp)), nature);
        assert_eq!(squeeze(&delete(&delete(&s, sp), u)), nature);
        assert_eq!(delete(&delete(&squeeze(&s), sp), u), nature);
        assert_eq!(delete(&squeeze(&delete(&s, sp)), u), nature);
    }

    #[test]
    fn squeeze_and_delete_do_not_commute_in_general() {
        // an <unk> between two equal letters keeps them apart under squeeze-first
        let s = seq("a <unk> a");
        let delete_first = squeeze(&delete(&delete(&s, Token::UNK), Token::SPACE));
        let squeeze_first = delete(&delete(&squeeze(&s), Token::SPACE), Token::UNK);
        assert_eq!(delete_first, seq("a"));
        assert_eq!(squeeze_first, seq("a a"));
    }

    #[test]
    fn display_roundtrip() {
        let s = seq(TABLE_INPUT);
        assert_eq!(s.to_string(), TABLE_INPUT);
        assert_eq!(squeeze(&s).spelled(), "na_t<unk>u_r<unk>e<unk>");
        assert!(CharSeq::from_word("o'k").is_ok());
        assert!(CharSeq::from_word("a1").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn token() -> impl Strategy<Value = Token> {
            (0..Token::COUNT).prop_map(|i| Token::from_index(i).unwrap())
        }

        fn charseq() -> impl Strategy<Value = CharSeq> {
            prop::collection::vec(token(), 0..40).prop_map(CharSeq::new)
        }

        proptest! {
            #[test]
            fn idempotent(s in charseq(), p in token()) {
                let sq = squeeze(&s);
                prop_assert_eq!(squeeze(&sq), sq);
                let d = delete(&s, p);
                prop_assert_eq!(delete(&d, p), d);
            }

            #[test]
            fn deletions_commute(s in charseq()) {
                let a = squeeze(&delete(&delete(&s, Token::UNK), Token::SPACE));
                let b = squeeze(&delete(&delete(&s, Token::SPACE), Token::UNK));
                prop_assert_eq!(a, b);
            }

            #[test]
            fn delete_counts(s in charseq(), p in token()) {
                let d = delete(&s, p);
                prop_assert_eq!(count_pattern(&d, p), 0);
                prop_assert_eq!(length(&d), length(&s) - count_pattern(&s, p));
                prop_assert!(length(&squeeze(&s)) <= length(&s));
            }

            #[test]
            fn text_roundtrip(s in charseq()) {
                prop_assert_eq!(s.to_string().parse::<CharSeq>().unwrap(), s);
            }
        }
    }
}
