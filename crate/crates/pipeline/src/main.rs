use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Deserialize;
use wikicite_core::analysis::{filter_candidates, geometric_mean_perplexity, sample_passages, DEFAULT_TARGET_LENGTH};
use wikicite_core::article::parse_into;
use wikicite_core::quality::{fit_thresholds, QualityThresholds};
use wikicite_core::stats::{scrape_taxonomy, stats_csv, stats_text_table, StatsTable};
use wikicite_core::{Article, Element, LanguageConfig, QualityLabel};
use wikicite_pipeline::chunk::{read_chunk, write_atomic, write_chunk};
use wikicite_pipeline::delta::{load_previous, write_delta_chunks};
use wikicite_pipeline::enrich::{enrich_chunk, ActionApiClient, EnrichConfig};
use wikicite_pipeline::ingest::{dump_digest, fetch_dump, ingest_dump, open_dump, save_manifest, stream_pages};
use wikicite_pipeline::orchestrate::{run_pipeline, RunConfig, Stage};
use wikicite_pipeline::quality_client::{score_articles, Scorer};
use wikicite_pipeline::scrape::{scrape_articles, HostPacer, HttpFetcher, ScrapePolicy};
use wikicite_pipeline::translate::{
    extract_translatables, insert_translations, records_from_jsonl, records_to_jsonl, translate_records,
    IdentityTranslator, ReverseTranslator, Translator,
};

#[derive(Parser)]
#[command(name = "wikicite", version, about = "Build citation-anchored corpora from Wikipedia dumps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stream a dump (path or http(s) URL) into 1000-article chunk files.
    Ingest {
        #[arg(long)]
        dump: String,
        #[arg(long)]
        lang: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Parse the wikicode of every unparsed article in a chunk.
    Parse {
        #[arg(long)]
        chunk: PathBuf,
        #[arg(long)]
        lang: String,
        /// Language config JSON overriding the shipped one.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output file; defaults to rewriting the chunk in place.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Download and extract web citation sources.
    Scrape {
        #[arg(long)]
        chunk: PathBuf,
        #[arg(long)]
        policy: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score extracted sources and assign 1-5 quality labels.
    Quality {
        #[arg(long)]
        chunk: PathBuf,
        /// Model service URL; without it the built-in heuristic is used.
        #[arg(long)]
        endpoint: Option<String>,
        #[arg(long)]
        thresholds: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Add cross-lingual links and creation dates (chunk rewritten in place).
    Enrich {
        #[arg(long)]
        chunk: PathBuf,
        #[arg(long)]
        lang: String,
        #[arg(long, default_value_t = 1.0)]
        rate: f64,
        /// Action API endpoint; defaults to https://<lang>.wikipedia.org/w/api.php.
        #[arg(long)]
        api: Option<String>,
    },
    /// Ingest a new dump, carrying forward unchanged articles from a previous run.
    Delta {
        #[arg(long)]
        dump: PathBuf,
        #[arg(long)]
        lang: String,
        #[arg(long)]
        out: PathBuf,
        /// Final chunk files of the previous run.
        #[arg(long, num_args = 1.., required = true)]
        prev: Vec<PathBuf>,
    },
    /// Write headings and sentences of a chunk as translatable records.
    TranslateExtract {
        #[arg(long)]
        chunk: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fill translated_text in a records file with a test translator.
    Translate {
        #[arg(long)]
        records: PathBuf,
        #[arg(long, value_parser = ["identity", "reverse"])]
        translator: String,
        #[arg(long)]
        lang: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Insert translated records back into their chunk.
    TranslateInsert {
        #[arg(long)]
        chunk: PathBuf,
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count element types per language.
    Stats {
        chunks: Vec<PathBuf>,
        /// Language for all inputs; otherwise taken from the directory layout.
        #[arg(long)]
        lang: Option<String>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also print the scrape outcome breakdown.
        #[arg(long)]
        taxonomy: bool,
    },
    /// Length-weighted sample of paragraph passages.
    Sample {
        chunks: Vec<PathBuf>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TARGET_LENGTH)]
        target: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Geometric-mean perplexity of JSON-lines token log-likelihoods.
    Perplexity {
        #[arg(long)]
        input: PathBuf,
    },
    /// Fit label thresholds from JSON lines of {"score": x, "label": k}.
    FitThresholds {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the staged pipeline described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's stage list, e.g. "ingest,parse".
        #[arg(long)]
        stages: Option<String>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn save(chunk: &Path, out: Option<&Path>, articles: &[Article]) -> Result<()> {
    write_chunk(out.unwrap_or(chunk), articles)?;
    Ok(())
}

/// Nearest ancestor directory named like a language code.
fn language_from_path(path: &Path) -> Option<String> {
    path.ancestors().skip(1).filter_map(|p| p.file_name()?.to_str()).find_map(|name| {
        let ok = (2..=3).contains(&name.len()) && name.bytes().all(|b| b.is_ascii_lowercase());
        ok.then(|| name.to_string())
    })
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Ingest { dump, lang, out } => {
            let local = if dump.starts_with("http://") || dump.starts_with("https://") {
                let dest = out.join(format!("{lang}-dump.xml.download"));
                fs::create_dir_all(&out)?;
                let n = fetch_dump(&dump, &dest)?;
                log::info!("fetched {n} bytes to {}", dest.display());
                dest
            } else {
                PathBuf::from(dump)
            };
            let m = ingest_dump(&local, &out, &lang)?;
            println!(
                "{} articles in {} chunks ({} filtered) under {}",
                m.article_count,
                m.chunk_paths.len(),
                m.filtered_count,
                out.join(&lang).display()
            );
        }
        Command::Parse { chunk, lang, config, out } => {
            let cfg = match config {
                Some(p) => LanguageConfig::from_json(&fs::read_to_string(&p)?)?,
                None => LanguageConfig::for_language(&lang),
            };
            let mut articles = read_chunk(&chunk)?;
            let warnings: usize = articles.iter_mut().map(|a| parse_into(a, &cfg)).sum();
            save(&chunk, out.as_deref(), &articles)?;
            println!("parsed {} articles, {warnings} warnings", articles.len());
        }
        Command::Scrape { chunk, policy, out } => {
            let policy: ScrapePolicy = match policy {
                Some(p) => read_json(&p)?,
                None => ScrapePolicy::default(),
            };
            if let Err(e) = policy.validate() {
                bail!("invalid policy: {e}");
            }
            let mut articles = read_chunk(&chunk)?;
            let pacer = HostPacer::new(std::time::Duration::from_millis(policy.per_host_delay_ms));
            let report = scrape_articles(&mut articles, &HttpFetcher::new(&policy), &policy, &pacer);
            save(&chunk, out.as_deref(), &articles)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
        Command::Quality { chunk, endpoint, thresholds, out } => {
            let thresholds: QualityThresholds = match thresholds {
                Some(p) => read_json(&p)?,
                None => QualityThresholds::default(),
            };
            let scorer = endpoint.map_or(Scorer::Heuristic, Scorer::remote);
            let mut articles = read_chunk(&chunk)?;
            let report = score_articles(&mut articles, &scorer, &thresholds)?;
            save(&chunk, out.as_deref(), &articles)?;
            println!("scored {} sources ({} by fallback)", report.scored, report.fallback_scored);
        }
        Command::Enrich { chunk, lang, rate, api } => {
            let mut config = EnrichConfig::for_language(&lang);
            config.rate = rate;
            if let Some(api) = api {
                config.endpoint = api;
            }
            let mut client = ActionApiClient::new(config, &lang);
            let r = enrich_chunk(&chunk, &mut client)?;
            println!(
                "enriched {}, missing {}, skipped {}, failed {} ({} requests)",
                r.enriched, r.missing, r.skipped, r.failed, client.requests
            );
        }
        Command::Delta { dump, lang, out, prev } => {
            let previous = load_previous(&prev)?;
            let dir = out.join(&lang).join(Stage::Ingest.name());
            let report = write_delta_chunks(stream_pages(open_dump(&dump)?), &previous, &dir, &lang)?;
            // Record the dump digest so `run` picks these chunks up as its ingest output.
            if let Some(mut m) = report.manifest.clone() {
                m.dump_sha256 = Some(dump_digest(&dump)?);
                save_manifest(&dir, &m)?;
            }
            println!(
                "{} to process, {} carried forward",
                report.selection.to_process.len(),
                report.selection.carried_forward.len()
            );
            println!("{}", serde_json::to_string(&report.selection)?);
        }
        Command::TranslateExtract { chunk, out } => {
            let id = chunk.file_name().and_then(|n| n.to_str()).unwrap_or("chunk").to_string();
            let records = extract_translatables(&id, &read_chunk(&chunk)?);
            write_atomic(&out, records_to_jsonl(&records).as_bytes())?;
            println!("{} records", records.len());
        }
        Command::Translate { records, translator, lang, out } => {
            let mut recs = records_from_jsonl(&fs::read_to_string(&records)?)?;
            let t: &dyn Translator = if translator == "reverse" { &ReverseTranslator } else { &IdentityTranslator };
            translate_records(&mut recs, t, &lang, 64)?;
            write_atomic(&out, records_to_jsonl(&recs).as_bytes())?;
        }
        Command::TranslateInsert { chunk, records, out } => {
            let id = chunk.file_name().and_then(|n| n.to_str()).unwrap_or("chunk").to_string();
            let recs = records_from_jsonl(&fs::read_to_string(&records)?)?;
            let mut articles = read_chunk(&chunk)?;
            let n = insert_translations(&id, &mut articles, &recs)?;
            save(&chunk, out.as_deref(), &articles)?;
            println!("inserted {n} translations");
        }
        Command::Stats { chunks, lang, csv, taxonomy } => {
            let mut tables: BTreeMap<String, StatsTable> = BTreeMap::new();
            let mut outcomes = BTreeMap::new();
            for path in &chunks {
                let language = lang.clone().or_else(|| language_from_path(path)).unwrap_or_else(|| "unknown".into());
                let articles = read_chunk(path)?;
                *tables.entry(language).or_default() += StatsTable::of_articles(&articles);
                for (k, v) in scrape_taxonomy(&articles) {
                    *outcomes.entry(k).or_insert(0u64) += v;
                }
            }
            print!("{}", stats_text_table(&tables));
            if taxonomy {
                for (k, v) in &outcomes {
                    println!("{:<22}{v}", serde_json::to_value(k)?.as_str().unwrap_or_default());
                }
            }
            if let Some(csv) = csv {
                write_atomic(&csv, stats_csv(&tables).as_bytes())?;
            }
        }
        Command::Sample { chunks, n, seed, target, out } => {
            if target == 0 {
                bail!("--target must be positive");
            }
            let mut texts = Vec::new();
            for path in &chunks {
                for a in read_chunk(path)? {
                    texts.extend(a.elements.iter().filter_map(|e| match e {
                        Element::Paragraph(p) => Some(p.text()),
                        _ => None,
                    }));
                }
            }
            let candidates = filter_candidates(texts, target);
            let sample = sample_passages(&candidates, n, seed)?;
            let lines: String = sample.iter().map(|c| serde_json::to_string(c).expect("serializes") + "\n").collect();
            match out {
                Some(p) => write_atomic(&p, lines.as_bytes())?,
                None => print!("{lines}"),
            }
        }
        Command::Perplexity { input } => {
            #[derive(Deserialize)]
            #[serde(untagged)]
            enum Line {
                Bare(Vec<f64>),
                Wrapped { log_likelihoods: Vec<f64> },
            }
            let text = fs::read_to_string(&input)?;
            let mut passages = Vec::new();
            for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
                let parsed: Line = serde_json::from_str(line).with_context(|| format!("line {}", i + 1))?;
                passages.push(match parsed {
                    Line::Bare(v) | Line::Wrapped { log_likelihoods: v } => v,
                });
            }
            println!("{}", geometric_mean_perplexity(&passages)?);
        }
        Command::FitThresholds { input, out } => {
            #[derive(Deserialize)]
            struct Example {
                score: f64,
                label: u8,
            }
            let text = fs::read_to_string(&input)?;
            let (mut scores, mut labels) = (Vec::new(), Vec::new());
            for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
                let ex: Example = serde_json::from_str(line).with_context(|| format!("line {}", i + 1))?;
                scores.push(ex.score);
                labels.push(QualityLabel::new(ex.label).with_context(|| format!("line {}: label out of range", i + 1))?);
            }
            let t = fit_thresholds(&scores, &labels)?;
            write_atomic(&out, serde_json::to_string(&t)?.as_bytes())?;
            println!("{:?}", t.cuts());
        }
        Command::Run { config, stages, report } => {
            let mut cfg: RunConfig = read_json(&config)?;
            if let Some(s) = stages {
                cfg.stages = Stage::parse_list(&s).map_err(anyhow::Error::msg)?;
            }
            let r = run_pipeline(&cfg)?;
            let json = serde_json::to_string_pretty(&r)?;
            match report {
                Some(p) => write_atomic(&p, json.as_bytes())?,
                None => println!("{json}"),
            }
            if r.total_failures() > 0 {
                bail!("{} chunk failures", r.total_failures());
            }
        }
    }
    Ok(())
}
