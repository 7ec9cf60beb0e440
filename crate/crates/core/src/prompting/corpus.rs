//! In-context example corpus.
//!
//! One example per `.icl` file:
//!
//! ```text
//! --- id: reduction-sum
//! --- tags: reduction
//! --- sequential
//! <C source>
//! --- parallel
//! <C source with a #pragma omp line>
//! --- explanation
//! <prose>
//! ```

use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

use crate::frontend::is_omp_pragma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternTag {
    Map,
    Reduction,
    StencilRead,
    Nested,
    Branchy,
    PrivateTemp,
    TwodArray,
}

impl PatternTag {
    pub const ALL: [PatternTag; 7] = [
        PatternTag::Map,
        PatternTag::Reduction,
        PatternTag::StencilRead,
        PatternTag::Nested,
        PatternTag::Branchy,
        PatternTag::PrivateTemp,
        PatternTag::TwodArray,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PatternTag::Map => "map",
            PatternTag::Reduction => "reduction",
            PatternTag::StencilRead => "stencil_read",
            PatternTag::Nested => "nested",
            PatternTag::Branchy => "branchy",
            PatternTag::PrivateTemp => "private_temp",
            PatternTag::TwodArray => "twod_array",
        }
    }
}

impl fmt::Display for PatternTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PatternTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PatternTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown tag `{s}`"))
    }
}

pub type TagSet = BTreeSet<PatternTag>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IclExample {
    pub id: String,
    pub pattern_tags: TagSet,
    pub sequential_code: String,
    pub parallel_code: String,
    pub explanation: String,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{file}: {message}")]
    CorpusFormatError { file: String, message: String },
    #[error("duplicate example id `{id}` in {file}")]
    DuplicateId { id: String, file: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Examples sorted by id.
#[derive(Debug, Clone, Default, Serialize)]
pub struct IclCorpus {
    pub examples: Vec<IclExample>,
}

/// File extension of corpus entries.
pub const EXTENSION: &str = "icl";

const BUNDLED: &[(&str, &str)] = &[
    ("branchy-clamp.icl", include_str!("../../corpus/branchy-clamp.icl")),
    (
        "branchy-positive-sum.icl",
        include_str!("../../corpus/branchy-positive-sum.icl"),
    ),
    ("map-saxpy.icl", include_str!("../../corpus/map-saxpy.icl")),
    ("map-vector-add.icl", include_str!("../../corpus/map-vector-add.icl")),
    ("nested-matmul.icl", include_str!("../../corpus/nested-matmul.icl")),
    (
        "private-temp-square.icl",
        include_str!("../../corpus/private-temp-square.icl"),
    ),
    ("reduction-dot.icl", include_str!("../../corpus/reduction-dot.icl")),
    ("reduction-max.icl", include_str!("../../corpus/reduction-max.icl")),
    ("reduction-sum.icl", include_str!("../../corpus/reduction-sum.icl")),
    (
        "stencil-jacobi-2d.icl",
        include_str!("../../corpus/stencil-jacobi-2d.icl"),
    ),
    (
        "stencil-three-point.icl",
        include_str!("../../corpus/stencil-three-point.icl"),
    ),
    ("twod-row-scale.icl", include_str!("../../corpus/twod-row-scale.icl")),
];

fn normalized(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Parallel code with every `#pragma omp` line removed.
pub fn strip_omp_lines(code: &str) -> String {
    code.split_inclusive('\n').filter(|l| !is_omp_pragma(l)).collect()
}

pub fn parse_example(file: &str, text: &str) -> Result<IclExample, CorpusError> {
    let err = |message: String| CorpusError::CorpusFormatError {
        file: file.to_string(),
        message,
    };
    let mut id = None;
    let mut tags = None;
    let mut bodies: [Option<String>; 3] = [None, None, None];
    let mut current: Option<usize> = None;
    for line in text.split_inclusive('\n') {
        let bare = line.trim_end_matches(['\r', '\n']);
        if let Some(rest) = bare.strip_prefix("--- ") {
            let section = |idx: usize, bodies: &mut [Option<String>; 3]| {
                if bodies[idx].is_some() {
                    return Err(err(format!("repeated section `{rest}`")));
                }
                bodies[idx] = Some(String::new());
                Ok(Some(idx))
            };
            current = if let Some(v) = rest.strip_prefix("id:") {
                if id.replace(v.trim().to_string()).is_some() {
                    return Err(err("repeated id".into()));
                }
                None
            } else if let Some(v) = rest.strip_prefix("tags:") {
                let parsed: Result<TagSet, String> = v
                    .split(',')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(str::parse)
                    .collect();
                if tags.replace(parsed.map_err(err)?).is_some() {
                    return Err(err("repeated tags".into()));
                }
                None
            } else {
                match rest.trim() {
                    "sequential" => section(0, &mut bodies)?,
                    "parallel" => section(1, &mut bodies)?,
                    "explanation" => section(2, &mut bodies)?,
                    other => return Err(err(format!("unknown section `{other}`"))),
                }
            };
            continue;
        }
        match current {
            Some(idx) => bodies[idx].as_mut().expect("section opened").push_str(line),
            None if bare.trim().is_empty() => {}
            None => return Err(err(format!("text outside a section: `{bare}`"))),
        }
    }
    let id = id.filter(|s| !s.is_empty()).ok_or_else(|| err("missing id".into()))?;
    let pattern_tags = tags.ok_or_else(|| err("missing tags".into()))?;
    if pattern_tags.is_empty() {
        return Err(err("tags must not be empty".into()));
    }
    let [Some(sequential_code), Some(parallel_code), Some(explanation)] = bodies else {
        return Err(err("missing sequential, parallel, or explanation section".into()));
    };
    if !parallel_code.split_inclusive('\n').any(is_omp_pragma) {
        return Err(err("parallel code has no `#pragma omp` line".into()));
    }
    if normalized(&strip_omp_lines(&parallel_code)) != normalized(&sequential_code) {
        return Err(err(
            "parallel code without pragmas differs from the sequential code".into()
        ));
    }
    Ok(IclExample {
        id,
        pattern_tags,
        sequential_code,
        parallel_code,
        explanation,
    })
}

impl IclCorpus {
    pub fn from_entries<'a>(entries: impl IntoIterator<Item = (String, &'a str)>) -> Result<IclCorpus, CorpusError> {
        let mut examples: Vec<(IclExample, String)> = Vec::new();
        for (file, text) in entries {
            let ex = parse_example(&file, text)?;
            if examples.iter().any(|(e, _)| e.id == ex.id) {
                return Err(CorpusError::DuplicateId { id: ex.id, file });
            }
            examples.push((ex, file));
        }
        let mut examples: Vec<IclExample> = examples.into_iter().map(|(e, _)| e).collect();
        examples.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(IclCorpus { examples })
    }

    /// The corpus shipped with the crate.
    pub fn bundled() -> IclCorpus {
        IclCorpus::from_entries(BUNDLED.iter().map(|(f, t)| (f.to_string(), *t))).expect("bundled corpus is valid")
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn get(&self, id: &str) -> Option<&IclExample> {
        self.examples.iter().find(|e| e.id == id)
    }
}

/// Load every `*.icl` file in `dir`, in file-name order.
pub fn load_corpus(dir: &Path) -> Result<IclCorpus, CorpusError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CorpusError::Io { path, source }
    };
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == EXTENSION))
        .collect();
    files.sort();
    let mut texts = Vec::with_capacity(files.len());
    for f in &files {
        let bytes = std::fs::read(f).map_err(io(f))?;
        let text = String::from_utf8(bytes).map_err(|_| CorpusError::CorpusFormatError {
            file: f.display().to_string(),
            message: "not valid UTF-8".into(),
        })?;
        texts.push((f.display().to_string(), text));
    }
    IclCorpus::from_entries(texts.iter().map(|(f, t)| (f.clone(), t.as_str())))
}
