//! Statistical and accounting properties of the protocol simulator.

use leakdpt::diqkd::{
    honest_boxes, run_batch, summarize, AdversaryScript, BoxPair, ClassicalCheatingBoxes, DiqkdError, ProtocolParams,
};

fn honest(delta: f64) -> impl Fn() -> Result<Box<dyn BoxPair>, DiqkdError> + Sync {
    move || Ok(Box::new(honest_boxes(delta)?) as Box<dyn BoxPair>)
}

#[test]
fn key_mismatch_on_s_concentrates_at_delta() {
    let delta = 0.03;
    let p = ProtocolParams {
        n: 1000,
        alpha: 0.5,
        gamma: 0.1,
        delta,
        seed: 21,
    };
    let runs = 1000;
    let records = run_batch(&p, honest(delta), None, 0.0, runs).unwrap();
    let kept: Vec<f64> = records.iter().filter(|r| !r.aborted).map(|r| r.mismatch_s).collect();
    assert!(kept.len() > 900);
    let mean = kept.iter().sum::<f64>() / kept.len() as f64;
    let sigma = (delta * (1.0 - delta) / (p.s_size() * kept.len()) as f64).sqrt();
    assert!(
        (mean - delta).abs() <= 3.0 * sigma,
        "mean mismatch {mean}, 3σ = {}",
        3.0 * sigma
    );
    assert_eq!(summarize(&records).mean_mismatch_nonaborted, mean);
}

#[test]
fn leaked_bits_are_metered_exactly() {
    let p = ProtocolParams {
        n: 300,
        alpha: 0.5,
        gamma: 0.2,
        delta: 0.0,
        seed: 3,
    };
    let script = AdversaryScript::leak_alice_inputs(100);
    let cheat = || Ok(Box::new(ClassicalCheatingBoxes::new()?) as Box<dyn BoxPair>);
    let records = run_batch(&p, cheat, Some(&script), 1.0, 20).unwrap();
    assert!(records.iter().all(|r| r.leaked_bits == script.total_bits()));
    // 200 bits exceed the ⌊0.5·300⌋ = 150-bit budget.
    assert!(matches!(
        run_batch(&p, cheat, Some(&script), 0.5, 1),
        Err(DiqkdError::BudgetExceeded {
            needed: 200,
            limit: 150
        })
    ));
}
