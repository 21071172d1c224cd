//! Articulatory effort from Visible Speech symbols.
//!
//! Every English sound symbol is composed from ten radicals, so a sound is a
//! 10-bit state. Moving between two sounds costs the number of radicals
//! that change (popcount of the XOR), and a word's effort is the sum of
//! those costs along its sound sequence, starting from the all-zero rest
//! state.
//!
//! The symbol inventory and the phone-to-symbol mapping are read from a TOML
//! file. A bundled copy is compiled in; any file loaded is checked against
//! the published reference rows before use.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phonetics::Phone;

/// The ten radicals, in serialization order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Radical {
    Voice,
    RoundedVoice,
    VowelDefiner,
    WideVowelDefiner,
    Whisper,
    MouthContracted,
    MouthDivided,
    Mixer,
    Shutter,
    Nasal,
}

impl Radical {
    pub const ALL: [Radical; 10] = [
        Radical::Voice,
        Radical::RoundedVoice,
        Radical::VowelDefiner,
        Radical::WideVowelDefiner,
        Radical::Whisper,
        Radical::MouthContracted,
        Radical::MouthDivided,
        Radical::Mixer,
        Radical::Shutter,
        Radical::Nasal,
    ];
}

/// A 10-bit articulatory state; bit `i` is `Radical::ALL[i]`.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VsVector(u16);

impl VsVector {
    pub const REST: VsVector = VsVector(0);
    const MASK: u16 = (1 << 10) - 1;

    pub fn from_bits(bits: [u8; 10]) -> Self {
        let mut v = 0u16;
        for (i, b) in bits.iter().enumerate() {
            if *b != 0 {
                v |= 1 << i;
            }
        }
        VsVector(v)
    }

    pub fn from_radicals(radicals: &[Radical]) -> Self {
        VsVector(radicals.iter().fold(0, |acc, r| acc | 1 << (*r as u16)))
    }

    pub fn from_raw(raw: u16) -> Option<Self> {
        (raw & !Self::MASK == 0).then_some(VsVector(raw))
    }

    pub fn raw(self) -> u16 {
        self.0
    }

    pub fn bits(self) -> [u8; 10] {
        std::array::from_fn(|i| ((self.0 >> i) & 1) as u8)
    }

    pub fn has(self, r: Radical) -> bool {
        self.0 & (1 << r as u16) != 0
    }
}

impl fmt::Debug for VsVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VsVector({self})")
    }
}

impl fmt::Display for VsVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = self.bits();
        write!(f, "[")?;
        for (i, x) in b.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for VsVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.bits().serialize(s)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VsSequence(pub Vec<VsVector>);

impl VsSequence {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Per-step efforts, the first step leaving the rest state.
    pub fn transitions(&self) -> impl Iterator<Item = u32> + '_ {
        std::iter::once(VsVector::REST)
            .chain(self.0.iter().copied())
            .zip(self.0.iter().copied())
            .map(|(a, b)| transition_effort(a, b))
    }
}

/// Number of radicals that differ between two states.
pub fn transition_effort(a: VsVector, b: VsVector) -> u32 {
    (a.0 ^ b.0).count_ones()
}

pub fn word_effort(seq: &VsSequence) -> u32 {
    seq.transitions().sum()
}

pub fn effort_histogram(seq: &VsSequence) -> BTreeMap<u32, usize> {
    let mut h = BTreeMap::new();
    for e in seq.transitions() {
        *h.entry(e).or_insert(0) += 1;
    }
    h
}

/// Reference rows every symbol table must agree with: symbol id and bits.
pub const REFERENCE_SYMBOLS: [(&str, [u8; 10]); 6] = [
    ("bs", [0, 0, 0, 0, 0, 1, 0, 0, 1, 0]),
    ("bsv", [1, 0, 0, 0, 0, 1, 0, 0, 1, 0]),
    ("pnv", [1, 0, 0, 0, 0, 1, 0, 0, 0, 1]),
    ("pbv", [1, 0, 0, 0, 0, 1, 0, 1, 1, 0]),
    ("vhbpr", [0, 1, 1, 0, 0, 0, 0, 0, 0, 0]),
    ("vhbwr", [0, 1, 0, 1, 0, 0, 0, 0, 0, 0]),
];

/// Reference word whose full sound sequence is known.
pub const REFERENCE_WORD: &str = "naturalization";
pub const REFERENCE_WORD_PHONES: &str = "N AE CH ER AH L IH Z EY SH AH N";
pub const REFERENCE_WORD_VECTORS: [[u8; 10]; 14] = [
    [1, 0, 0, 0, 0, 1, 0, 0, 0, 1],
    [1, 0, 0, 1, 0, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 1, 0, 1, 0, 0],
    [0, 1, 1, 0, 0, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 1, 0, 0, 0, 0],
    [1, 0, 1, 0, 0, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 0, 1, 0, 0, 0],
    [1, 0, 1, 0, 0, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 1, 0, 1, 0, 0],
    [1, 0, 0, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 1, 0, 1, 0, 0],
    [1, 0, 1, 0, 0, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 1, 0, 0, 0, 1],
];

#[derive(Deserialize)]
struct VsFile {
    symbols: BTreeMap<String, SymbolRow>,
    phones: BTreeMap<String, Vec<String>>,
}

#[derive(Deserialize)]
struct SymbolRow {
    bits: Vec<u8>,
    #[serde(default)]
    gloss: String,
    #[serde(default)]
    curated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymbolInfo {
    pub vector: VsVector,
    pub gloss: String,
    /// Composed by hand rather than taken from a published row.
    pub curated: bool,
}

const BUNDLED: &str = include_str!("../data/vs_table.toml");

/// Symbol inventory plus the phone-to-symbol mapping.
#[derive(Clone, Debug, PartialEq)]
pub struct VsTable {
    symbols: BTreeMap<String, SymbolInfo>,
    phones: BTreeMap<Phone, (Vec<String>, Vec<VsVector>)>,
}

impl VsTable {
    pub fn bundled() -> Self {
        Self::parse_str(BUNDLED, Path::new("<bundled vs_table.toml>"))
            .expect("bundled VS table is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_str(&text, path)
    }

    /// Parse and validate against the reference rows.
    pub fn parse_str(text: &str, origin: &Path) -> Result<Self> {
        let file: VsFile =
            toml::from_str(text).map_err(|e| Error::parse(origin, 0, e.to_string()))?;
        let mut symbols = BTreeMap::new();
        for (id, row) in file.symbols {
            let bits: [u8; 10] = row.bits.as_slice().try_into().map_err(|_| {
                Error::parse(origin, 0, format!("symbol `{id}` needs exactly 10 bits"))
            })?;
            if bits.iter().any(|b| *b > 1) {
                return Err(Error::parse(
                    origin,
                    0,
                    format!("symbol `{id}` has a non-binary bit"),
                ));
            }
            symbols.insert(
                id,
                SymbolInfo {
                    vector: VsVector::from_bits(bits),
                    gloss: row.gloss,
                    curated: row.curated,
                },
            );
        }
        let mut phones = BTreeMap::new();
        for (name, ids) in file.phones {
            let phone: Phone = name
                .parse()
                .map_err(|e: Error| Error::parse(origin, 0, e.to_string()))?;
            if ids.is_empty() {
                return Err(Error::parse(
                    origin,
                    0,
                    format!("phone {name} maps to no symbols"),
                ));
            }
            let vectors = ids
                .iter()
                .map(|id| {
                    symbols
                        .get(id)
                        .map(|s: &SymbolInfo| s.vector)
                        .ok_or_else(|| Error::UnknownSymbol(id.clone()))
                })
                .collect::<Result<Vec<_>>>()?;
            phones.insert(phone, (ids, vectors));
        }
        let table = VsTable { symbols, phones };
        table.check_reference()?;
        Ok(table)
    }

    /// Reference symbols present in the table must carry the reference
    /// bits, and if every phone of the reference word is mapped its sound
    /// sequence must match exactly.
    fn check_reference(&self) -> Result<()> {
        for (id, bits) in REFERENCE_SYMBOLS {
            if let Some(info) = self.symbols.get(id) {
                let expected = VsVector::from_bits(bits);
                if info.vector != expected {
                    return Err(Error::ReferenceMismatch(format!(
                        "symbol `{id}` is {} but must be {expected}",
                        info.vector
                    )));
                }
            }
        }
        let phones: Vec<Phone> = REFERENCE_WORD_PHONES
            .split_whitespace()
            .map(|p| p.parse().expect("reference phones are valid"))
            .collect();
        if phones.iter().all(|p| self.phones.contains_key(p)) {
            let got: Vec<VsVector> = phones
                .iter()
                .flat_map(|p| self.phones[p].1.iter().copied())
                .collect();
            let want: Vec<VsVector> = REFERENCE_WORD_VECTORS
                .iter()
                .map(|b| VsVector::from_bits(*b))
                .collect();
            if got != want {
                return Err(Error::ReferenceMismatch(format!(
                    "phone mapping does not reproduce the reference sequence for `{REFERENCE_WORD}`"
                )));
            }
        }
        Ok(())
    }

    pub fn vs_vector(&self, symbol: &str) -> Result<VsVector> {
        self.symbols
            .get(symbol)
            .map(|s| s.vector)
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))
    }

    pub fn symbol(&self, symbol: &str) -> Option<&SymbolInfo> {
        self.symbols.get(symbol)
    }

    pub fn symbols(&self) -> impl Iterator<Item = (&str, &SymbolInfo)> {
        self.symbols.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn phone_vectors(&self, phone: Phone) -> Result<&[VsVector]> {
        self.phones
            .get(&phone)
            .map(|(_, v)| v.as_slice())
            .ok_or_else(|| Error::UnmappedPhone(phone.to_string()))
    }

    pub fn phone_symbols(&self, phone: Phone) -> Result<&[String]> {
        self.phones
            .get(&phone)
            .map(|(ids, _)| ids.as_slice())
            .ok_or_else(|| Error::UnmappedPhone(phone.to_string()))
    }
}
