//! Published values, restated here independently of the library constants.

use std::collections::BTreeMap;

use dysintel::strops::{count_pattern, delete, length, squeeze};
use dysintel::text_metrics::{normalize_hypothesis, score_ld, score_sm, score_unk, GroundTruth};
use dysintel::visible_speech::{effort_histogram, transition_effort, word_effort};
use dysintel::{
    arpabet_to_vs, filter_candidates, vowel_traversal, CharSeq, FilterCriteria, FormantTable,
    LexEntry, Lexicon, Phone, Token, VsTable, VsVector,
};

const STREAM: &str = "n a a _ t t t <unk> u u u _ r r r r <unk> e e <unk>";

fn seq(s: &str) -> CharSeq {
    s.parse().unwrap()
}

fn naturalization() -> LexEntry {
    LexEntry::parse("naturalization", "N AE CH ER AH L IH Z EY SH AH N").unwrap()
}

#[test]
fn string_operation_table() {
    let s = seq(STREAM);
    let (unk, sp) = (Token::UNK, Token::SPACE);
    assert_eq!(count_pattern(&s, unk), 3);
    assert_eq!(length(&s), 20);
    assert_eq!(squeeze(&s), seq("n a _ t <unk> u _ r <unk> e <unk>"));
    assert_eq!(delete(&s, unk), seq("n a a _ t t t u u u _ r r r r e e"));
    let nature = seq("n a t u r e");
    assert_eq!(squeeze(&delete(&delete(&s, unk), sp)), nature);
    assert_eq!(squeeze(&delete(&delete(&s, sp), unk)), nature);
    assert_eq!(delete(&delete(&squeeze(&s), sp), unk), nature);
    assert_eq!(delete(&squeeze(&delete(&s, sp)), unk), nature);
}

#[test]
fn normalized_stream_scores() {
    let h = normalize_hypothesis(&seq(STREAM));
    let g = GroundTruth::from_word("nature").unwrap();
    assert_eq!(h.s1(), &seq("n a t u r e"));
    assert_eq!(h.unk_count(), 3);
    assert_eq!(score_unk(&h, &g).value, 50.0);
    assert_eq!(score_sm(&h, &g).value, 100.0);
    assert_eq!(score_ld(&h, &g).value, 100.0);

    let natre = normalize_hypothesis(&seq("n a t r e"));
    assert!((score_sm(&natre, &g).value - 1000.0 / 11.0).abs() < 1e-9);
    assert!((score_ld(&natre, &g).value - 1000.0 / 11.0).abs() < 1e-9);
}

#[test]
fn radical_examples() {
    let t = VsTable::bundled();
    let expected: [(&str, [u8; 10]); 6] = [
        ("bs", [0, 0, 0, 0, 0, 1, 0, 0, 1, 0]),
        ("bsv", [1, 0, 0, 0, 0, 1, 0, 0, 1, 0]),
        ("pnv", [1, 0, 0, 0, 0, 1, 0, 0, 0, 1]),
        ("pbv", [1, 0, 0, 0, 0, 1, 0, 1, 1, 0]),
        ("vhbpr", [0, 1, 1, 0, 0, 0, 0, 0, 0, 0]),
        ("vhbwr", [0, 1, 0, 1, 0, 0, 0, 0, 0, 0]),
    ];
    for (id, bits) in expected {
        assert_eq!(t.vs_vector(id).unwrap().bits(), bits, "{id}");
    }
}

#[test]
fn reference_word_sequence_and_effort() {
    let rows: [[u8; 10]; 14] = [
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
    let steps = [3, 3, 3, 5, 4, 2, 2, 2, 2, 2, 4, 4, 4, 3];
    let vs = arpabet_to_vs(&naturalization(), &VsTable::bundled()).unwrap();
    let got: Vec<[u8; 10]> = vs.0.iter().map(|v| v.bits()).collect();
    assert_eq!(got, rows.to_vec());
    let transitions: Vec<u32> = vs.transitions().collect();
    assert_eq!(transitions, steps.to_vec());
    assert_eq!(word_effort(&vs), 43);
    let hist: BTreeMap<u32, usize> = [(2, 5), (3, 4), (4, 4), (5, 1)].into_iter().collect();
    assert_eq!(effort_histogram(&vs), hist);
}

#[test]
fn worked_transition() {
    let pnv = VsVector::from_bits([1, 0, 0, 0, 0, 1, 0, 0, 0, 1]);
    let vlfw = VsVector::from_bits([1, 0, 0, 1, 0, 0, 0, 0, 0, 0]);
    assert_eq!(transition_effort(pnv, vlfw), 3);
}

#[test]
fn formant_rows() {
    let t = FormantTable::bundled();
    let rows = [
        (Phone::EY, 580.0, 1799.0),
        (Phone::AO, 652.0, 997.0),
        (Phone::ER, 474.0, 1379.0),
        (Phone::AH, 623.0, 1200.0),
        (Phone::UW, 378.0, 997.0),
        (Phone::AE, 588.0, 1952.0),
        (Phone::IY, 342.0, 2322.0),
        (Phone::IH, 427.0, 2034.0),
        (Phone::UH, 469.0, 1122.0),
        (Phone::AA, 768.0, 1333.0),
        (Phone::EH, 476.0, 2089.0),
    ];
    for (p, f1, f2) in rows {
        let pts = t.formant_lookup(p).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!((pts[0].f1, pts[0].f2), (f1, f2), "{p}");
    }
}

#[test]
fn reference_traversal() {
    let t = FormantTable::bundled();
    let v = vowel_traversal(&naturalization(), &t).unwrap();
    assert!((v - 4593.44).abs() <= 0.01, "{v}");
    // first leg from the origin, closed form
    let rest_leg = (588.0f64 * 588.0 + 1952.0 * 1952.0).sqrt();
    assert!((rest_leg - 2038.64).abs() <= 0.01);
    let ae = LexEntry::parse("ae", "AE").unwrap();
    assert!((vowel_traversal(&ae, &t).unwrap() - rest_leg).abs() < 1e-9);
}

#[test]
fn candidate_pool() {
    let words = [
        "agricultural",
        "apothecary",
        "authoritative",
        "autobiography",
        "dissatisfaction",
        "exactitude",
        "exaggerate",
        "inalienable",
        "inexhaustible",
        "irresolute",
        "legislature",
        "naturalization",
        "overshadowed",
        "psychological",
    ];
    let got = filter_candidates(
        &Lexicon::bundled_candidates(),
        &FormantTable::bundled(),
        &FilterCriteria::default(),
    )
    .unwrap();
    assert_eq!(got, words.to_vec());
}

#[test]
fn subset_count_for_fourteen_words() {
    use dysintel::{CandidateWord, CorrelationMode, Scenario, SelectionProblem};
    let pool: Vec<CandidateWord> = (0..14)
        .map(|i| CandidateWord {
            word: format!("w{i:02}"),
            effort: 20 + i,
        })
        .collect();
    let p = SelectionProblem::new(
        pool,
        None,
        Scenario::DictionaryOnly.alphas(),
        CorrelationMode::Absolute,
    )
    .unwrap();
    assert_eq!(p.subset_count(), 16_383);
    assert_eq!(p.exhaustive().subsets_evaluated, 16_383);
}
