use std::path::PathBuf;

use gclda::evaluation::point_estimates;
use gclda::Corpus;

use super::load_samples;
use crate::error::CliResult;
use crate::files;

pub struct ReportArgs {
    pub samples: PathBuf,
    pub top: usize,
    pub output_dir: PathBuf,
}

pub const TOPIC_COLUMNS: [&str; 5] = ["topic", "prevalence", "rank", "word", "probability"];
pub const RHO_COLUMNS: [&str; 5] = ["topic", "covariate", "eta", "pi_bar", "rho"];
pub const PI_COLUMNS: [&str; 6] = ["period", "label", "topic", "pi", "prior_weight", "alpha"];

pub fn run(args: &ReportArgs) -> CliResult<()> {
    let model = load_samples(&args.samples)?;
    let periods = model.period_labels.len();
    // Point estimates only need the vocabulary size from the corpus.
    let shape = Corpus::from_tokens(
        model.vocabulary.len(),
        vec![Vec::new(); periods],
        vec![vec![0.0; model.covariate_count]; periods],
    );
    let s = point_estimates(&model.samples, &shape, &model.config)?;
    let dir = &args.output_dir;
    files::create_dir(dir)?;

    let mut topics = Vec::new();
    for (k, words) in s.top_words.iter().enumerate() {
        for (rank, &w) in words.iter().take(args.top).enumerate() {
            topics.push((k, s.pi_bar[k], rank + 1, &model.vocabulary[w as usize], s.phi_hat[k][w as usize]));
        }
    }
    files::write_csv(&dir.join("topics.csv"), &TOPIC_COLUMNS, topics)?;

    let rho = s.eta_hat.iter().zip(&s.rho).enumerate().flat_map(|(k, (eta, rho))| {
        let pi_bar = s.pi_bar[k];
        eta.iter().zip(rho).enumerate().map(move |(j, (e, r))| (k, j, *e, pi_bar, *r))
    });
    files::write_csv(&dir.join("rho.csv"), &RHO_COLUMNS, rho)?;

    let series = (0..periods).flat_map(|t| {
        let s = &s;
        let label = &model.period_labels[t];
        (0..s.pi_bar.len()).map(move |k| (t, label, k, s.pi_series[t][k], s.prior_weights[t][k], s.alpha_hat[t]))
    });
    files::write_csv(&dir.join("pi_series.csv"), &PI_COLUMNS, series)?;
    files::write_json(&dir.join("summary.json"), &s)?;
    Ok(())
}
