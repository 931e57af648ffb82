//! Command-line and config-file options and their merge into one resolved config.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use posweight::corpus::UnknownTagPolicy;
use posweight::experiment::default_w_grid;
use posweight::{Error, Model, ModelParamsF64, Result, WeightKind, WindowLength};
use serde::Deserialize;

/// Options shared by every subcommand. Each may also come from the TOML file given
/// with `--config`; a flag on the command line wins over the file.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// TREC SGML collection file(s), tagged with the built-in fallback tagger
    #[arg(long, value_delimiter = ',')]
    pub corpus: Option<Vec<PathBuf>>,
    /// Pre-tagged collection file(s) (`#DOC id` headers, `token<TAB>tag` lines)
    #[arg(long, value_delimiter = ',')]
    pub tagged: Option<Vec<PathBuf>>,
    /// Directory written by `index`; used instead of --corpus/--tagged
    #[arg(long)]
    pub index: Option<PathBuf>,
    /// POS n-gram window length (2-8)
    #[arg(long)]
    pub n: Option<usize>,
    /// Fine-to-coarse tag map (`fine<TAB>coarse` lines)
    #[arg(long)]
    pub collapse_map: Option<PathBuf>,
    /// Lexicon for the fallback tagger (`surface<TAB>coarse` lines)
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Tags missing from the collapse map: `other` (default) or `error`
    #[arg(long)]
    pub unknown_tags: Option<String>,
    /// Apply English Snowball stemming to index and query terms
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub stem: Option<bool>,
    /// Stopword list, one word per line
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// tfidf, bm25 or dirichlet
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub mu: Option<f64>,
    /// Dirichlet mu values to sweep
    #[arg(long, value_delimiter = ',')]
    pub mu_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub k1: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub k3: Option<f64>,
    /// Pivoted normalization slope
    #[arg(long)]
    pub slope: Option<f64>,
    /// Weight kind(s), `none`, or `all`
    #[arg(long, value_delimiter = ',')]
    pub weight: Option<Vec<String>>,
    /// Integration strength
    #[arg(long)]
    pub w: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub w_grid: Option<Vec<f64>>,
    /// Topics file (`qid<TAB>title` lines)
    #[arg(long)]
    pub topics: Option<PathBuf>,
    /// TREC qrels file
    #[arg(long)]
    pub qrels: Option<PathBuf>,
    /// Documents retrieved per query
    #[arg(long)]
    pub depth: Option<usize>,
    /// Training query ids (comma list; `301-450` ranges allowed)
    #[arg(long, value_delimiter = ',')]
    pub train: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    pub test: Option<Vec<String>>,
    /// TREC run file to evaluate
    #[arg(long)]
    pub run: Option<PathBuf>,
    /// Baseline run to test `--run` against
    #[arg(long)]
    pub baseline: Option<PathBuf>,
    /// Tag written in the last column of run files (default: model name)
    #[arg(long)]
    pub run_tag: Option<String>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output file or directory, depending on the command
    #[arg(long)]
    pub out: Option<PathBuf>,
}

macro_rules! prefer {
    ($cli:expr, $file:expr; $($field:ident),* $(,)?) => {
        Options { $($field: $cli.$field.or($file.$field),)* }
    };
}

impl Options {
    /// `self` (command line) over `file`.
    pub fn over(self, file: Options) -> Options {
        prefer!(self, file;
            corpus, tagged, index, n, collapse_map, lexicon, unknown_tags, stem, stopwords,
            model, mu, mu_grid, k1, b, k3, slope, weight, w, w_grid, topics, qrels, depth,
            train, test, run, baseline, run_tag, threads, out,
        )
    }

    pub fn from_toml(text: &str) -> Result<Options> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config file: {e}")))
    }

    pub fn load(path: &Path) -> Result<Options> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Fails if any file the options name does not exist.
    pub fn check_paths(&self) -> Result<()> {
        let singles = [
            &self.index,
            &self.collapse_map,
            &self.lexicon,
            &self.stopwords,
            &self.topics,
            &self.qrels,
            &self.run,
            &self.baseline,
        ];
        let lists = [&self.corpus, &self.tagged];
        let paths = singles
            .into_iter()
            .flatten()
            .chain(lists.into_iter().flatten().flatten());
        for p in paths {
            if !p.exists() {
                return Err(Error::Config(format!("{}: not found", p.display())));
            }
        }
        Ok(())
    }

    pub fn window(&self) -> Result<WindowLength> {
        WindowLength::new(self.n.unwrap_or(WindowLength::default().get()))
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn unknown_tag_policy(&self) -> Result<UnknownTagPolicy> {
        match self.unknown_tags.as_deref() {
            None | Some("other") => Ok(UnknownTagPolicy::MapToOther),
            Some("error") => Ok(UnknownTagPolicy::Error),
            Some(other) => Err(Error::Config(format!(
                "unknown-tags must be `other` or `error`, not {other:?}"
            ))),
        }
    }

    pub fn model(&self) -> Result<Model> {
        match &self.model {
            Some(m) => Model::from_str(m),
            None => Ok(Model::Bm25),
        }
    }

    pub fn params(&self) -> Result<ModelParamsF64> {
        let mut p = ModelParamsF64::default();
        if let Some(v) = self.k1 {
            p.bm25.k1 = v;
        }
        if let Some(v) = self.b {
            p.bm25.b = v;
        }
        if let Some(v) = self.k3 {
            p.bm25.k3 = v;
        }
        if let Some(v) = self.slope {
            p.slope = v;
        }
        if let Some(v) = self.mu {
            p.mu = v;
        }
        p.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(p)
    }

    /// Weight kinds named by `--weight`; `none` gives an empty list and `all` (or no
    /// flag, when `default_all`) every kind.
    pub fn weights(&self, default_all: bool) -> Result<Vec<WeightKind>> {
        let names = match &self.weight {
            Some(names) => names.clone(),
            None if default_all => return Ok(WeightKind::ALL.to_vec()),
            None => return Ok(Vec::new()),
        };
        let mut kinds = Vec::new();
        for name in names.iter().map(|n| n.trim()) {
            match name {
                "none" => {}
                "all" => kinds.extend(WeightKind::ALL),
                other => kinds.push(WeightKind::from_str(other)?),
            }
        }
        let mut seen = Vec::new();
        kinds.retain(|k| {
            let fresh = !seen.contains(k);
            seen.push(*k);
            fresh
        });
        Ok(kinds)
    }

    pub fn w_grid(&self) -> Result<Vec<f64>> {
        let grid = self.w_grid.clone().unwrap_or_else(default_w_grid);
        if grid.is_empty() {
            return Err(Error::Config("w grid is empty".into()));
        }
        Ok(grid)
    }

    pub fn depth(&self) -> Result<usize> {
        match self.depth {
            Some(0) => Err(Error::Config("depth must be at least 1".into())),
            Some(d) => Ok(d),
            None => Ok(posweight::eval::DEFAULT_DEPTH),
        }
    }

    pub fn require<'a, T>(&self, value: &'a Option<T>, flag: &str) -> Result<&'a T> {
        value
            .as_ref()
            .ok_or_else(|| Error::Config(format!("--{flag} is required")))
    }
}

/// Expands `301-305,310` style id lists.
pub fn expand_ids(items: &[String]) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for item in items.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        match item.split_once('-') {
            Some((a, b)) if a.parse::<u64>().is_ok() && b.parse::<u64>().is_ok() => {
                let (a, b): (u64, u64) = (a.parse().unwrap(), b.parse().unwrap());
                if a > b {
                    return Err(Error::Config(format!("empty id range {item}")));
                }
                out.extend((a..=b).map(|i| i.to_string()));
            }
            _ => out.push(item.to_string()),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file =
            Options::from_toml("model = \"dirichlet\"\nmu = 1000\nw_grid = [0, 1.5]\ndepth = 50\n")
                .unwrap();
        let cli = Options {
            model: Some("bm25".into()),
            ..Options::default()
        };
        let merged = cli.over(file);
        assert_eq!(merged.model().unwrap(), Model::Bm25);
        assert_eq!(merged.params().unwrap().mu, 1000.0);
        assert_eq!(merged.w_grid().unwrap(), vec![0.0, 1.5]);
        assert_eq!(merged.depth().unwrap(), 50);
        assert_eq!(Options::default().w_grid().unwrap().len(), 22);
    }

    #[test]
    fn bad_config() {
        assert!(Options::from_toml("nonsense = 1").unwrap_err().is_config());
        let o = Options {
            model: Some("foo".into()),
            ..Options::default()
        };
        let e = o.model().unwrap_err();
        assert!(e.is_config() && e.to_string().contains("tfidf, bm25, dirichlet"));
    }

    #[test]
    fn weights_and_ids() {
        let o = Options {
            weight: Some(vec!["pos_idf".into(), "all".into()]),
            ..Options::default()
        };
        assert_eq!(o.weights(false).unwrap().len(), 5);
        assert_eq!(o.weights(false).unwrap()[0], WeightKind::PosIdf);
        assert!(Options::default().weights(false).unwrap().is_empty());
        assert_eq!(
            expand_ids(&["301-303".into(), "x".into()]).unwrap(),
            ["301", "302", "303", "x"]
        );
    }
}
