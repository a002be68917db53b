//! A budgeted noisy session: query, hit the cap and budget, export the transcript.
use hinf_core::oracle::{NoiseModel, QueryOracle, QuerySession};
use hinf_core::signals::{ComplexVec, FirFilter};

fn main() -> hinf_core::Result<()> {
    let g = FirFilter::from_real(&[0.8, 0.3, -0.2])?;
    let mut s = QuerySession::new(g, 6, 1.0, 3, NoiseModel::real(0.05), 42)?;
    println!("SNR = {}", s.snr());

    let y = s.query(&ComplexVec::basis(6, 0))?;
    println!(
        "impulse response: {:?}",
        y.iter().map(|z| z.re).collect::<Vec<_>>()
    );

    let too_big = ComplexVec::from_real(&[1.0, 1.0, 0.0, 0.0, 0.0, 0.0])?;
    println!("oversized input: {}", s.query(&too_big).unwrap_err());
    println!("used {} of {}", s.used(), s.budget());

    s.query(&ComplexVec::basis(6, 1))?;
    s.query(&ComplexVec::basis(6, 2))?;
    println!(
        "after budget: {}",
        s.query(&ComplexVec::basis(6, 0)).unwrap_err()
    );

    s.write_transcript_jsonl(std::io::stdout().lock())?;
    Ok(())
}
