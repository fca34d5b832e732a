#![allow(dead_code)]

pub mod oracle;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use mrclens::squad::{parse_dataset, Dataset};

pub fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture(name: &str) -> Dataset {
    parse_dataset(&fs::read(fixture_path(name)).unwrap()).unwrap()
}

pub fn corpus() -> Dataset {
    fixture("corpus.json")
}

pub fn disjoint() -> Dataset {
    fixture("disjoint.json")
}

/// Official SQuAD v1.1 dev file, when provided.
pub const SQUAD_DEV_ENV: &str = "MRCLENS_SQUAD_DEV";

pub fn squad_dev() -> Option<Dataset> {
    let path = std::env::var_os(SQUAD_DEV_ENV)?;
    let bytes = fs::read(&path).unwrap_or_else(|e| panic!("cannot read {path:?}: {e}"));
    Some(parse_dataset(&bytes).expect("official dev file parses"))
}

/// The first `n` paragraphs in document order, keeping article boundaries.
pub fn first_paragraphs(d: &Dataset, n: usize) -> Dataset {
    let mut left = n;
    let mut out = Dataset { version: d.version.clone(), articles: Vec::new() };
    for a in &d.articles {
        if left == 0 {
            break;
        }
        let mut a = a.clone();
        a.paragraphs.truncate(left);
        left -= a.paragraphs.len();
        out.articles.push(a);
    }
    out
}

/// Relative path to file bytes, for comparing output trees.
pub fn read_tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        let mut entries: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
        entries.sort();
        for p in entries {
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}
