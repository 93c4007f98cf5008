use dpsan_core::*;
use proptest::prelude::*;

fn entry(i: usize, eps: f64, group: Option<u8>) -> LedgerEntry {
    LedgerEntry {
        label: format!("q{i}"),
        epsilon: eps,
        composition: match group {
            Some(g) => Composition::Parallel(format!("g{g}")),
            None => Composition::Sequential,
        },
    }
}

fn entries() -> impl Strategy<Value = Vec<LedgerEntry>> {
    prop::collection::vec((1e-4..2.0f64, prop::option::of(0u8..3)), 1..20)
        .prop_map(|v| v.into_iter().enumerate().map(|(i, (e, g))| entry(i, e, g)).collect())
}

proptest! {
    #[test]
    fn compose_is_order_independent(mut es in entries(), seed in any::<u64>()) {
        let before = compose(&es);
        // Deterministic shuffle from the seed.
        let len = es.len();
        for i in (1..len).rev() {
            let j = (seed.wrapping_mul(6364136223846793005).wrapping_add(i as u64) % (i as u64 + 1)) as usize;
            es.swap(i, j);
        }
        prop_assert_eq!(compose(&es), before);
    }

    #[test]
    fn compose_matches_definition(es in entries()) {
        let seq: f64 = es.iter().filter(|e| e.composition == Composition::Sequential).map(|e| e.epsilon).sum();
        let par: f64 = (0u8..3)
            .map(|g| {
                es.iter()
                    .filter(|e| e.composition == Composition::Parallel(format!("g{g}")))
                    .map(|e| e.epsilon)
                    .fold(0.0, f64::max)
            })
            .sum();
        prop_assert!((compose(&es) - (seq + par)).abs() < 1e-12);
    }

    #[test]
    fn shares_sum_exactly(total in 1e-6..100.0f64, k in 1usize..500) {
        let shares = allocate_equal(total, k).unwrap();
        prop_assert_eq!(shares.len(), k);
        prop_assert_eq!(shares.iter().sum::<f64>(), total);
    }

    #[test]
    fn ledger_accepts_its_shares_and_never_goes_negative(total in 1e-3..10.0f64, k in 1usize..50, extra in 1e-6..1.0f64) {
        let mut ledger = BudgetLedger::new(total).unwrap();
        for (i, s) in allocate_equal(total, k).unwrap().into_iter().enumerate() {
            ledger.spend(&format!("s{i}"), s, Composition::Sequential).unwrap();
            prop_assert!(ledger.remaining() >= 0.0);
        }
        prop_assert!(ledger.spend("extra", extra, Composition::Sequential).is_err());
        prop_assert!(ledger.remaining() >= 0.0);
        let round = BudgetLedger::from_audit_log(&ledger.to_audit_log()).unwrap();
        prop_assert_eq!(round, ledger);
    }
}

#[test]
fn reference_allocations() {
    assert_eq!(allocate_equal(1.0, 3).unwrap().iter().sum::<f64>(), 1.0);
    assert!(allocate_equal(0.1, 5).unwrap().iter().all(|s| (s - 0.02).abs() < 1e-15));
    assert_eq!(allocate_equal(0.4, 1).unwrap(), vec![0.4]);
    let mut ledger = BudgetLedger::new(1.0).unwrap();
    assert_eq!(ledger.remaining(), 1.0);
    ledger.spend("a", 1.0, Composition::Parallel("g".into())).unwrap();
    ledger.spend("b", 1.0, Composition::Parallel("g".into())).unwrap();
    assert_eq!(ledger.spent(), 1.0);
}
