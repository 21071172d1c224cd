//! Pronunciation lexicon, vowel-space traversal and candidate filtering.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::visible_speech::{VsSequence, VsTable};

macro_rules! phones {
    ($($name:ident => $vowel:expr),* $(,)?) => {
        /// The 39-phone ARPABET inventory (stress markers are not part of a phone).
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum Phone { $($name),* }

        impl Phone {
            pub const ALL: [Phone; 39] = [$(Phone::$name),*];

            pub fn symbol(self) -> &'static str {
                match self { $(Phone::$name => stringify!($name)),* }
            }

            pub fn is_vowel(self) -> bool {
                match self { $(Phone::$name => $vowel),* }
            }
        }

        impl FromStr for Phone {
            type Err = Error;

            /// Accepts `AE`, `ae` and stress-marked forms such as `AE1`.
            fn from_str(s: &str) -> Result<Self> {
                let base = s.trim_end_matches(|c: char| c.is_ascii_digit()).to_ascii_uppercase();
                match base.as_str() {
                    $(stringify!($name) => Ok(Phone::$name),)*
                    _ => Err(Error::InvalidPhone(s.to_string())),
                }
            }
        }
    };
}

phones! {
    AA => true, AE => true, AH => true, AO => true, AW => true, AY => true,
    B => false, CH => false, D => false, DH => false,
    EH => true, ER => true, EY => true,
    F => false, G => false, HH => false,
    IH => true, IY => true,
    JH => false, K => false, L => false, M => false, N => false, NG => false,
    OW => true, OY => true,
    P => false, R => false, S => false, SH => false, T => false, TH => false,
    UH => true, UW => true,
    V => false, W => false, Y => false, Z => false, ZH => false,
}

impl fmt::Display for Phone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexEntry {
    pub word: String,
    pub phones: Vec<Phone>,
}

impl LexEntry {
    pub fn new(word: &str, phones: Vec<Phone>) -> Result<Self> {
        if phones.is_empty() {
            return Err(Error::InvalidPhone(format!("`{word}` has no phones")));
        }
        Ok(LexEntry {
            word: word.to_lowercase(),
            phones,
        })
    }

    /// Build from a space-separated phone string, e.g. `"N AE1 CH ER0"`.
    pub fn parse(word: &str, phones: &str) -> Result<Self> {
        let phones = phones
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<Phone>>>()?;
        Self::new(word, phones)
    }

    pub fn vowels(&self) -> impl Iterator<Item = Phone> + '_ {
        self.phones.iter().copied().filter(|p| p.is_vowel())
    }
}

/// Word to pronunciation map, one pronunciation per word.
///
/// The text format is the CMU dictionary layout: one `WORD PH PH ...` entry
/// per line, `;;;` or `#` comments. Alternate pronunciations written as
/// `WORD(2)` are skipped and counted.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Lexicon {
    entries: BTreeMap<String, LexEntry>,
    skipped_variants: usize,
}

const BUNDLED_CANDIDATES: &str = include_str!("../data/candidates.dict");

impl Lexicon {
    pub fn bundled_candidates() -> Self {
        Self::parse_str(BUNDLED_CANDIDATES, Path::new("<bundled candidates.dict>"))
            .expect("bundled lexicon is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_str(&text, path)
    }

    pub fn parse_str(text: &str, origin: &Path) -> Result<Self> {
        let mut lex = Lexicon::default();
        for (n, line) in text.lines().enumerate() {
            let line_no = n as u64 + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with(";;;") || line.starts_with('#') {
                continue;
            }
            let (word, phones) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::parse(origin, line_no, "entry has no phones"))?;
            if word.ends_with(')') && word.contains('(') {
                lex.skipped_variants += 1;
                continue;
            }
            let entry = LexEntry::parse(word, phones)
                .map_err(|e| Error::parse(origin, line_no, e.to_string()))?;
            if lex.entries.contains_key(&entry.word) {
                return Err(Error::parse(
                    origin,
                    line_no,
                    format!("duplicate entry for `{}`", entry.word),
                ));
            }
            lex.entries.insert(entry.word.clone(), entry);
        }
        Ok(lex)
    }

    pub fn insert(&mut self, entry: LexEntry) {
        self.entries.insert(entry.word.clone(), entry);
    }

    pub fn get(&self, word: &str) -> Result<&LexEntry> {
        self.entries
            .get(&word.to_lowercase())
            .ok_or_else(|| Error::UnknownWord(word.to_string()))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(&word.to_lowercase())
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexEntry> {
        self.entries.values()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn skipped_variants(&self) -> usize {
        self.skipped_variants
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormantPoint {
    pub f1: f64,
    pub f2: f64,
}

impl FormantPoint {
    pub const REST: FormantPoint = FormantPoint { f1: 0.0, f2: 0.0 };

    pub fn distance(self, other: FormantPoint) -> f64 {
        (self.f1 - other.f1).hypot(self.f2 - other.f2)
    }
}

#[derive(Deserialize)]
struct FormantFile {
    vowels: BTreeMap<String, FormantRow>,
    #[serde(default)]
    decompositions: BTreeMap<String, Vec<String>>,
}

#[derive(Deserialize)]
struct FormantRow {
    f1: f64,
    f2: f64,
}

const BUNDLED_FORMANTS: &str = include_str!("../data/formants.toml");

/// Average F1/F2 targets per vowel, plus two-target decompositions for
/// diphthongs that have no single entry.
#[derive(Clone, Debug, PartialEq)]
pub struct FormantTable {
    points: BTreeMap<Phone, FormantPoint>,
    decompositions: BTreeMap<Phone, Vec<Phone>>,
}

impl FormantTable {
    pub fn bundled() -> Self {
        Self::parse_str(BUNDLED_FORMANTS, Path::new("<bundled formants.toml>"))
            .expect("bundled formant table is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_str(&text, path)
    }

    pub fn parse_str(text: &str, origin: &Path) -> Result<Self> {
        let file: FormantFile =
            toml::from_str(text).map_err(|e| Error::parse(origin, 0, e.to_string()))?;
        let mut points = BTreeMap::new();
        for (name, row) in file.vowels {
            let phone = vowel_phone(&name, origin)?;
            if row.f1 < 0.0 || row.f2 < 0.0 {
                return Err(Error::parse(
                    origin,
                    0,
                    format!("negative formant for {name}"),
                ));
            }
            points.insert(
                phone,
                FormantPoint {
                    f1: row.f1,
                    f2: row.f2,
                },
            );
        }
        let mut decompositions = BTreeMap::new();
        for (name, targets) in file.decompositions {
            let phone = vowel_phone(&name, origin)?;
            let targets = targets
                .iter()
                .map(|t| vowel_phone(t, origin))
                .collect::<Result<Vec<_>>>()?;
            if let Some(missing) = targets.iter().find(|t| !points.contains_key(t)) {
                return Err(Error::parse(
                    origin,
                    0,
                    format!("{name} decomposes into {missing}, which has no formant entry"),
                ));
            }
            decompositions.insert(phone, targets);
        }
        Ok(FormantTable {
            points,
            decompositions,
        })
    }

    /// Formant targets of a vowel: one point for a table vowel, two for a
    /// decomposed diphthong.
    pub fn formant_lookup(&self, vowel: Phone) -> Result<Vec<FormantPoint>> {
        if let Some(p) = self.points.get(&vowel) {
            return Ok(vec![*p]);
        }
        match self.decompositions.get(&vowel) {
            Some(targets) => Ok(targets.iter().map(|t| self.points[t]).collect()),
            None => Err(Error::UnknownVowel(vowel.to_string())),
        }
    }
}

fn vowel_phone(name: &str, origin: &Path) -> Result<Phone> {
    let phone: Phone = name
        .parse()
        .map_err(|e: Error| Error::parse(origin, 0, e.to_string()))?;
    if !phone.is_vowel() {
        return Err(Error::parse(origin, 0, format!("{name} is not a vowel")));
    }
    Ok(phone)
}

/// Number of vowel nuclei in the transcription.
pub fn syllable_count(e: &LexEntry) -> usize {
    e.vowels().count()
}

/// Number of maximal runs of the letters a, e, i, o, u, y in the spelling.
pub fn orthographic_syllables(word: &str) -> usize {
    let mut count = 0;
    let mut in_run = false;
    for c in word.chars() {
        let v = matches!(c.to_ascii_lowercase(), 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
        if v && !in_run {
            count += 1;
        }
        in_run = v;
    }
    count
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SyllableRule {
    /// Vowel-letter groups in the spelling. This is the rule that yields the
    /// reference 14-word candidate pool from real pronunciations.
    #[default]
    Orthographic,
    /// Vowel phones in the transcription.
    Phonemic,
}

impl SyllableRule {
    pub fn count(self, e: &LexEntry) -> usize {
        match self {
            SyllableRule::Orthographic => orthographic_syllables(&e.word),
            SyllableRule::Phonemic => syllable_count(e),
        }
    }
}

impl FromStr for SyllableRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "orthographic" => Ok(SyllableRule::Orthographic),
            "phonemic" => Ok(SyllableRule::Phonemic),
            other => Err(Error::NoData(format!("unknown syllable rule `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraversalLeg {
    pub from: FormantPoint,
    pub to: FormantPoint,
    pub distance: f64,
}

/// Path through the F1/F2 plane starting at the rest point `(0, 0)` and
/// visiting each vowel target in order.
pub fn traversal_legs(e: &LexEntry, formants: &FormantTable) -> Result<Vec<TraversalLeg>> {
    let mut legs = Vec::new();
    let mut at = FormantPoint::REST;
    for v in e.vowels() {
        for to in formants.formant_lookup(v)? {
            legs.push(TraversalLeg {
                from: at,
                to,
                distance: at.distance(to),
            });
            at = to;
        }
    }
    if legs.is_empty() {
        return Err(Error::NoVowels(e.word.clone()));
    }
    Ok(legs)
}

pub fn vowel_traversal(e: &LexEntry, formants: &FormantTable) -> Result<f64> {
    Ok(traversal_legs(e, formants)?
        .iter()
        .map(|l| l.distance)
        .sum())
}

/// Concatenate the VS symbols of each phone.
pub fn arpabet_to_vs(e: &LexEntry, table: &VsTable) -> Result<VsSequence> {
    let mut out = Vec::with_capacity(e.phones.len() + 2);
    for &p in &e.phones {
        out.extend_from_slice(table.phone_vectors(p)?);
    }
    Ok(VsSequence(out))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FilterCriteria {
    pub min_syllables: usize,
    /// Exclusive lower bound in Hz.
    pub min_traversal: f64,
    pub syllable_rule: SyllableRule,
}

impl Default for FilterCriteria {
    fn default() -> Self {
        FilterCriteria {
            min_syllables: 5,
            min_traversal: 2400.0,
            syllable_rule: SyllableRule::Orthographic,
        }
    }
}

/// Words with at least `min_syllables` syllables and a traversal strictly
/// above `min_traversal`, sorted.
pub fn filter_candidates(
    lexicon: &Lexicon,
    formants: &FormantTable,
    criteria: &FilterCriteria,
) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for e in lexicon.entries() {
        if criteria.syllable_rule.count(e) < criteria.min_syllables {
            continue;
        }
        if e.vowels().next().is_none() {
            continue;
        }
        if vowel_traversal(e, formants)? > criteria.min_traversal {
            out.push(e.word.clone());
        }
    }
    Ok(out)
}
