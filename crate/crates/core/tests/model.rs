use gclda::model::recompute_counts;
use gclda::{ChainState, Corpus};
use proptest::prelude::*;

fn any_state() -> impl Strategy<Value = (Corpus, ChainState)> {
    (1usize..4, 2usize..5, 0usize..3).prop_flat_map(|(periods, k, p)| {
        (
            prop::collection::vec(prop::collection::vec(prop::collection::vec(0u32..6, 1..6), 0..3), periods),
            prop::collection::vec(prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), p), periods),
            prop::collection::vec(0.0f64..10.0, periods),
            prop::collection::vec(prop::collection::vec(1e-9f64..1.0, k), periods),
            prop::collection::vec(prop::collection::vec(-1.0f64..1.0, p), k),
            1e-300f64..1e300,
            any::<u64>(),
        )
            .prop_map(move |(docs, y, alpha, pi, eta, lambda, zseed)| {
                let corpus = Corpus::from_tokens(6, docs, y);
                let z: Vec<Vec<u32>> = corpus
                    .documents()
                    .enumerate()
                    .map(|(i, (_, d))| {
                        (0..d.len())
                            .map(|j| ((zseed >> ((i + j) % 48)) as usize % k) as u32)
                            .collect()
                    })
                    .collect();
                let counts = recompute_counts(&corpus, &z, k).unwrap();
                let state = ChainState { z, alpha, pi_tilde: pi, eta, lambda, counts };
                (corpus, state)
            })
    })
}

proptest! {
    #[test]
    fn chain_state_round_trips_bit_exactly((_corpus, state) in any_state()) {
        let text = serde_json::to_string(&state).unwrap();
        let back: ChainState = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &state);
        let bits = |s: &ChainState| -> Vec<u64> {
            s.alpha.iter().chain(s.pi_tilde.iter().flatten()).chain(s.eta.iter().flatten())
                .chain(std::iter::once(&s.lambda)).map(|x| x.to_bits()).collect()
        };
        prop_assert_eq!(bits(&back), bits(&state));
    }

    #[test]
    fn corpus_round_trips((corpus, _state) in any_state()) {
        let bytes = gclda::container::encode(gclda::container::Kind::Corpus, &corpus).unwrap();
        let back: Corpus = gclda::container::decode(gclda::container::Kind::Corpus, &bytes).unwrap();
        prop_assert_eq!(back, corpus);
    }
}
