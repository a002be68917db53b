//! Record a session, then rerun the estimator against the transcript.
use hinf_core::estimators::{estimate, EstimatorConfig};
use hinf_core::oracle::{read_transcript_jsonl, NoiseModel, QuerySession, ReplayOracle};
use hinf_core::signals::FirFilter;

fn main() -> hinf_core::Result<()> {
    let g = FirFilter::from_real(&[0.6, -0.8, 0.3])?;
    let noise = NoiseModel::real(0.1);
    let cfg = EstimatorConfig::power_a().with_seed(12);
    let mut live = QuerySession::new(g, 8, 1.0, 30, noise, 77)?;
    let first = estimate(&mut live, &cfg)?;

    let mut jsonl = Vec::new();
    live.write_transcript_jsonl(&mut jsonl)?;
    let mut oracle = ReplayOracle::new(read_transcript_jsonl(jsonl.as_slice())?, noise, Some(1.0))?;
    let again = estimate(&mut oracle, &cfg)?;
    println!(
        "live {:.12}, replayed {:.12}, identical: {}",
        first.final_estimate,
        again.final_estimate,
        first == again
    );

    let mut other = ReplayOracle::new(read_transcript_jsonl(jsonl.as_slice())?, noise, Some(1.0))?;
    println!(
        "different seed: {}",
        estimate(&mut other, &cfg.clone().with_seed(13)).unwrap_err()
    );
    Ok(())
}
