//! Serialization round-trip properties over generated documents.
//!
//! The canonical text form is the digest input, so `serialize ∘ parse`
//! must be the identity on canonical bytes for every document the
//! generator can produce — not just the hand-written fixtures.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ata_core::harness::generate::{random_problem, GeneratorConfig};
use ata_core::parse::{parse_claim, parse_kb};
use ata_core::serialize::{serialize_claim, serialize_kb};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn kb_and_claim_round_trip_for_any_seed(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_problem(&mut rng, &GeneratorConfig::default());

        let kb_text = serialize_kb(&p.kb);
        let kb_back = parse_kb(&kb_text).into_result().expect("canonical KB re-parses");
        prop_assert_eq!(&kb_back, &p.kb);
        prop_assert_eq!(serialize_kb(&kb_back), kb_text);

        let claim_text = serialize_claim(&p.claim);
        let claim_back = parse_claim(&claim_text, &p.kb)
            .into_result()
            .expect("canonical claim re-parses");
        prop_assert_eq!(&claim_back, &p.claim);
        prop_assert_eq!(serialize_claim(&claim_back), claim_text);
    }

    #[test]
    fn raw_text_survives_the_round_trip(seed in any::<u64>(), text in "\\PC*") {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_problem(&mut rng, &GeneratorConfig::default());
        let mut claim = p.claim;
        claim.raw_text = Some(text);

        let rendered = serialize_claim(&claim);
        let back = parse_claim(&rendered, &p.kb)
            .into_result()
            .expect("claim with raw text re-parses");
        prop_assert_eq!(back, claim);
    }
}
