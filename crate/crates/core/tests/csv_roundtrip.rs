use proptest::prelude::*;
use schelling::harness::NUM_OUTCOMES;
use schelling::io::csv::{read_sweep, write_sweep_rows, SweepRow};

fn value() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        (0u32..10_000).prop_map(|k| k as f64 / 20.0),
        Just(0.1 + 0.2),
        Just(f64::MIN_POSITIVE / 3.0),
        Just(-0.0),
    ]
}

fn row() -> impl Strategy<Value = SweepRow> {
    (
        value(),
        prop::array::uniform9(value()),
        prop::array::uniform9(value()),
    )
        .prop_map(|(sweep_value, mean, sd)| SweepRow {
            sweep_value,
            mean,
            sd,
        })
}

proptest! {
    #[test]
    fn rows_survive_a_round_trip_bit_for_bit(rows in prop::collection::vec(row(), 0..12)) {
        let bytes = write_sweep_rows(&rows).unwrap();
        let back = read_sweep(&bytes).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        for (a, b) in rows.iter().zip(&back) {
            prop_assert_eq!(a.sweep_value.to_bits(), b.sweep_value.to_bits());
            for i in 0..NUM_OUTCOMES {
                prop_assert_eq!(a.mean[i].to_bits(), b.mean[i].to_bits());
                prop_assert_eq!(a.sd[i].to_bits(), b.sd[i].to_bits());
            }
        }
        let text = String::from_utf8(bytes).unwrap();
        prop_assert_eq!(text.lines().count(), rows.len() + 1);
        prop_assert!(text.lines().all(|l| l.split(',').count() == 1 + 2 * NUM_OUTCOMES));
    }
}
