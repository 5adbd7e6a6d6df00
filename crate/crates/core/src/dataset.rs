//! Dataset registry, download cache and loading.

use std::fs::{self, File};
use std::io;
use std::path::{Path, PathBuf};

use log::info;

use crate::error::{Error, Result};
use crate::graph::{load_edge_list_path, EdgeListOptions, Graph};
use crate::rng::Seed;
use crate::synth::facebook_surrogate;

/// Environment variable naming the download cache directory.
pub const CACHE_ENV: &str = "LDP_POISON_CACHE";

/// Name of the built-in offline stand-in for the Facebook graph.
pub const SURROGATE: &str = "synthetic-facebook";

/// Fixed seed of the offline Facebook stand-in.
pub const SURROGATE_SEED: Seed = Seed(2024);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DatasetInfo {
    pub name: &'static str,
    pub url: &'static str,
    pub nodes: usize,
    pub edges: usize,
    /// Needs `--large` to load.
    pub large: bool,
}

impl DatasetInfo {
    pub fn file_name(&self) -> &'static str {
        self.url.rsplit('/').next().unwrap_or(self.name)
    }
}

pub const REGISTRY: &[DatasetInfo] = &[
    DatasetInfo {
        name: "facebook",
        url: "https://snap.stanford.edu/data/facebook_combined.txt.gz",
        nodes: 4039,
        edges: 88_234,
        large: false,
    },
    DatasetInfo {
        name: "enron",
        url: "https://snap.stanford.edu/data/email-Enron.txt.gz",
        nodes: 36_692,
        edges: 183_831,
        large: false,
    },
    DatasetInfo {
        name: "astroph",
        url: "https://snap.stanford.edu/data/ca-AstroPh.txt.gz",
        nodes: 18_772,
        edges: 198_110,
        large: false,
    },
    DatasetInfo {
        name: "gplus",
        url: "https://snap.stanford.edu/data/gplus_combined.txt.gz",
        nodes: 107_614,
        edges: 12_238_285,
        large: true,
    },
];

pub fn lookup(name: &str) -> Result<&'static DatasetInfo> {
    let key = name.to_ascii_lowercase();
    REGISTRY
        .iter()
        .find(|d| d.name == key)
        .ok_or_else(|| Error::UnknownDataset(name.to_string()))
}

/// `$LDP_POISON_CACHE`, or `./data` when unset.
pub fn default_cache_dir() -> PathBuf {
    std::env::var_os(CACHE_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("data"))
}

pub fn cached_path(info: &DatasetInfo, cache_dir: &Path) -> PathBuf {
    cache_dir.join(info.file_name())
}

fn verify(info: &DatasetInfo, g: &Graph) -> Result<()> {
    if g.num_nodes() != info.nodes || g.edge_count() != info.edges {
        return Err(Error::Integrity {
            dataset: info.name.to_string(),
            expected_nodes: info.nodes,
            expected_edges: info.edges,
            nodes: g.num_nodes(),
            edges: g.edge_count(),
        });
    }
    Ok(())
}

fn download(url: &str, dest: &Path) -> Result<()> {
    let network = |msg: String| Error::Network {
        url: url.to_string(),
        msg,
    };
    let response = ureq::get(url).call().map_err(|e| network(e.to_string()))?;
    let mut body = response.into_body().into_reader();
    let mut out = File::create(dest)?;
    io::copy(&mut body, &mut out).map_err(|e| network(e.to_string()))?;
    Ok(())
}

/// Download `name` into `cache_dir` unless already cached, check its node
/// and edge counts, and return the local path.
pub fn fetch_dataset(name: &str, cache_dir: &Path) -> Result<PathBuf> {
    let info = lookup(name)?;
    let path = cached_path(info, cache_dir);
    if path.exists() {
        return Ok(path);
    }
    fs::create_dir_all(cache_dir)?;
    let partial = cache_dir.join(format!("partial-{}", info.file_name()));
    info!("downloading {} to {}", info.url, path.display());
    download(info.url, &partial)?;
    let g = load_edge_list_path(&partial, &EdgeListOptions::default())?;
    if let Err(e) = verify(info, &g) {
        let _ = fs::remove_file(&partial);
        return Err(e);
    }
    fs::rename(&partial, &path)?;
    Ok(path)
}

/// Where a loaded graph came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Registry(&'static str),
    Surrogate,
    File(PathBuf),
}

impl std::fmt::Display for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Source::Registry(name) => f.write_str(name),
            Source::Surrogate => f.write_str(SURROGATE),
            Source::File(p) => write!(f, "{}", p.display()),
        }
    }
}

/// Resolve a dataset given by registry name, [`SURROGATE`], or file path.
///
/// Registry datasets are fetched on demand; large ones need `allow_large`.
pub fn load_dataset(spec: &str, cache_dir: &Path, allow_large: bool) -> Result<(Graph, Source)> {
    if spec == SURROGATE {
        return Ok((facebook_surrogate(SURROGATE_SEED), Source::Surrogate));
    }
    if let Ok(info) = lookup(spec) {
        if info.large && !allow_large {
            return Err(Error::Config(format!("dataset `{}` is large; pass --large to load it", info.name)));
        }
        let path = fetch_dataset(info.name, cache_dir)?;
        let g = load_edge_list_path(&path, &EdgeListOptions::default())?;
        verify(info, &g)?;
        return Ok((g, Source::Registry(info.name)));
    }
    let path = Path::new(spec);
    if path.exists() {
        let g = load_edge_list_path(path, &EdgeListOptions::default())?;
        return Ok((g, Source::File(path.to_path_buf())));
    }
    Err(Error::UnknownDataset(spec.to_string()))
}

/// The Facebook graph if it is already cached, otherwise the surrogate.
/// Never touches the network.
pub fn facebook_or_surrogate(cache_dir: &Path) -> Result<(Graph, Source)> {
    let info = lookup("facebook")?;
    let path = cached_path(info, cache_dir);
    if path.exists() {
        let g = load_edge_list_path(&path, &EdgeListOptions::default())?;
        verify(info, &g)?;
        Ok((g, Source::Registry(info.name)))
    } else {
        Ok((facebook_surrogate(SURROGATE_SEED), Source::Surrogate))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_lookup() {
        assert_eq!(lookup("facebook").unwrap().nodes, 4039);
        assert_eq!(lookup("Enron").unwrap().edges, 183_831);
        assert_eq!(lookup("facebook").unwrap().file_name(), "facebook_combined.txt.gz");
        assert!(matches!(lookup("orkut"), Err(Error::UnknownDataset(_))));
    }

    #[test]
    fn large_needs_opt_in() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(load_dataset("gplus", dir.path(), false), Err(Error::Config(_))));
    }

    #[test]
    fn cached_file_is_verified() {
        let dir = tempfile::tempdir().unwrap();
        let info = lookup("facebook").unwrap();
        let file = File::create(cached_path(info, dir.path())).unwrap();
        let mut gz = flate2::write::GzEncoder::new(file, flate2::Compression::default());
        io::Write::write_all(&mut gz, b"0 1\n1 2\n").unwrap();
        gz.finish().unwrap();
        let err = load_dataset("facebook", dir.path(), false).unwrap_err();
        assert!(matches!(err, Error::Integrity { nodes: 3, edges: 2, .. }), "{err}");
    }

    #[test]
    fn unknown_spec() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_dataset("no-such-thing", dir.path(), false),
            Err(Error::UnknownDataset(_))
        ));
    }
}
