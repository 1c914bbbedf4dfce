use culturegeo::embedding::{load_embedding, read_embedding, save_embedding};
use culturegeo::{Embedding, Format, LoadOptions};
use proptest::prelude::*;

const FORMATS: [Format; 3] = [Format::Word2VecBinary, Format::Word2VecText, Format::GloveText];

fn sample() -> Embedding {
    Embedding::from_rows(vec![
        ("The", vec![0.5, -1.25, 3.0]),
        ("the", vec![1.0, 0.0, 0.0]),
        ("café", vec![-0.125, 0.25, 0.375]),
        ("New_York", vec![0.0009765625, 2e3, -7.0]),
    ])
    .unwrap()
}

#[test]
fn files_round_trip_in_every_format() {
    let dir = tempfile::tempdir().unwrap();
    let emb = sample();
    for format in FORMATS {
        let path = dir.path().join(format!("e.{format}"));
        save_embedding(&emb, &path, format).unwrap();
        let (back, report) = load_embedding(&path, format, &LoadOptions::default()).unwrap();
        assert_eq!(back.tokens(), emb.tokens());
        assert_eq!(report.entries_read, 4);
        // Binary stores f32; every sample value is exactly representable.
        assert_eq!(back.matrix(), emb.matrix(), "{format}");
    }
}

#[test]
fn case_folding_keeps_first_and_truncates() {
    let mut buf = Vec::new();
    culturegeo::embedding::write_embedding(&sample(), &mut buf, Format::Word2VecBinary).unwrap();
    let opts = LoadOptions {
        case_fold: true,
        max_vocab: None,
    };
    let (emb, report) = read_embedding(buf.as_slice(), Format::Word2VecBinary, &opts).unwrap();
    assert_eq!(emb.tokens(), ["the", "café", "new_york"]);
    assert_eq!(emb.vector("the").unwrap(), [0.5, -1.25, 3.0]);
    assert_eq!(report.folded_duplicates, 1);

    let opts = LoadOptions {
        case_fold: false,
        max_vocab: Some(2),
    };
    let (emb, _) = read_embedding(buf.as_slice(), Format::Word2VecBinary, &opts).unwrap();
    assert_eq!(emb.len(), 2);
}

#[test]
fn malformed_input_is_rejected() {
    let bad_header = "3\nfoo 1 2\n";
    assert!(read_embedding(bad_header.as_bytes(), Format::Word2VecText, &LoadOptions::default()).is_err());
    let ragged = "a 1 2\nb 1\n";
    let err = read_embedding(ragged.as_bytes(), Format::GloveText, &LoadOptions::default()).unwrap_err();
    assert!(err.to_string().contains("line 2"), "{err}");
    let mut truncated = Vec::new();
    culturegeo::embedding::write_embedding(&sample(), &mut truncated, Format::Word2VecBinary).unwrap();
    truncated.truncate(truncated.len() - 6);
    assert!(read_embedding(truncated.as_slice(), Format::Word2VecBinary, &LoadOptions::default()).is_err());
    let missing = tempfile::tempdir().unwrap().path().join("nope.bin");
    assert!(load_embedding(missing, Format::Word2VecBinary, &LoadOptions::default()).is_err());
}

#[test]
fn format_names_agree_between_cli_and_serde() {
    for format in FORMATS {
        let name = serde_json::to_string(&format).unwrap();
        assert_eq!(name, format!("\"{format}\""));
        assert_eq!(format.to_string().parse::<Format>().unwrap(), format);
    }
}

proptest! {
    /// Writing then reading preserves tokens, order and values (to f32 for
    /// the binary format, exactly for text).
    #[test]
    fn round_trip(
        rows in prop::collection::btree_map("[a-zA-Z0-9_]{1,8}", prop::collection::vec(-1e6f64..1e6, 3), 1..20),
    ) {
        let emb = Embedding::from_rows(rows.into_iter()).unwrap();
        for format in FORMATS {
            let mut buf = Vec::new();
            culturegeo::embedding::write_embedding(&emb, &mut buf, format).unwrap();
            let (back, _) = read_embedding(buf.as_slice(), format, &LoadOptions::default()).unwrap();
            prop_assert_eq!(back.tokens(), emb.tokens());
            for (a, b) in back.matrix().iter().zip(emb.matrix()) {
                let want = if format == Format::Word2VecBinary { *b as f32 as f64 } else { *b };
                prop_assert_eq!(*a, want);
            }
        }
    }
}
