use mt_streams::mt::{MtState, STATE_PAYLOAD_BYTES, STATE_WORDS};
use mt_streams::partition::*;
use rand::{Rng, SeedableRng};

#[test]
fn split_continuity() {
    let set = generate_sequence_splitting(5489, 10_000, 8, true).unwrap();
    for w in set.statuses.windows(2) {
        let mut s = w[0].clone();
        s.advance(10_000);
        assert_eq!(s, w[1]);
    }
}

#[test]
fn random_states_round_trip() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let mut words = [0u32; STATE_WORDS];
        rng.fill(&mut words[..]);
        let state = MtState::from_parts(words, rng.gen_range(0..=STATE_WORDS)).unwrap();
        let text = serialize_status(&state);
        assert_eq!(parse_status(&text).unwrap(), state);
        assert_eq!(serialize_status(&parse_status(&text).unwrap()), text);
    }
    assert_eq!(STATE_PAYLOAD_BYTES, 2496);
}

#[test]
fn regenerated_sets_verify_identical() {
    let dir = tempfile::tempdir().unwrap();
    for (name, set) in [
        (
            "split",
            generate_sequence_splitting(1, 1000, 5, true).unwrap(),
        ),
        ("random", generate_random_spacing(2, 5).unwrap()),
        ("indexed", generate_indexed(3, 5).unwrap()),
    ] {
        let a = dir.path().join(format!("{name}_a"));
        let b = dir.path().join(format!("{name}_b"));
        let ma = write_set(&set, &a).unwrap();
        let mb = write_set(&regenerate(&set.provenance).unwrap(), &b).unwrap();
        assert_eq!(ma.fingerprint(), mb.fingerprint());
        let report = verify_sets(&a, &b).unwrap();
        assert!(report.is_identical(), "{report}");
        assert_eq!(report.identical.len(), 6);

        let loaded = load_status_file(&a.join(status_file_name(set.technique(), 4))).unwrap();
        assert_eq!(loaded.state, set.statuses[4]);
        let manifest =
            Manifest::parse(&std::fs::read_to_string(a.join(MANIFEST_NAME)).unwrap()).unwrap();
        assert_eq!(manifest, ma);
    }
}

#[test]
fn tampered_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let set = generate_indexed(0, 3).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    write_set(&set, &a).unwrap();
    write_set(&set, &b).unwrap();
    let victim = b.join(status_file_name(Technique::IndexedSequence, 1));
    std::fs::write(&victim, serialize_status(&MtState::init_genrand(99))).unwrap();
    let report = verify_sets(&a, &b).unwrap();
    assert!(!report.is_identical());
    assert_eq!(report.differing.len(), 1);
    assert_eq!(
        load_status_file(&victim).unwrap().state,
        MtState::init_genrand(99)
    );
}

#[test]
fn indexed_statuses_are_distinct() {
    let set = generate_indexed(0, 512).unwrap();
    let distinct: std::collections::HashSet<_> =
        set.statuses.iter().map(|s| s.words().to_vec()).collect();
    assert_eq!(distinct.len(), 512);
}
