//! Keyword registry: the tracked search terms and their categories.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    SymptomsEnglish,
    SymptomsFilipino,
    FaceWearing,
    Quarantine,
    NewNormal,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::SymptomsEnglish,
        Category::SymptomsFilipino,
        Category::FaceWearing,
        Category::Quarantine,
        Category::NewNormal,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Category::SymptomsEnglish => "SymptomsEnglish",
            Category::SymptomsFilipino => "SymptomsFilipino",
            Category::FaceWearing => "FaceWearing",
            Category::Quarantine => "Quarantine",
            Category::NewNormal => "NewNormal",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Category {
    type Err = RegistryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Category::ALL
            .into_iter()
            .find(|c| c.token().eq_ignore_ascii_case(s))
            .ok_or_else(|| RegistryError::UnknownCategory(s.to_string()))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RegistryError {
    #[error("unknown keyword category `{0}`")]
    UnknownCategory(String),
    #[error("duplicate keyword `{0}`")]
    DuplicateKeyword(String),
    #[error("empty keyword")]
    EmptyKeyword,
    #[error("line {line}: expected `keyword,category`")]
    Malformed { line: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordEntry {
    pub keyword: String,
    pub category: Category,
}

/// Ordered set of unique, lowercased keywords. Order defines matrix indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeywordRegistry {
    entries: Vec<KeywordEntry>,
}

const DEFAULT_KEYWORDS: [(&str, Category); 15] = [
    ("cough", Category::SymptomsEnglish),
    ("fever", Category::SymptomsEnglish),
    ("flu", Category::SymptomsEnglish),
    ("headache", Category::SymptomsEnglish),
    ("rashes", Category::SymptomsEnglish),
    ("lagnat", Category::SymptomsFilipino),
    ("sipon", Category::SymptomsFilipino),
    ("ubo", Category::SymptomsFilipino),
    ("masks", Category::FaceWearing),
    ("face shield", Category::FaceWearing),
    ("ecq", Category::Quarantine),
    ("quarantine", Category::Quarantine),
    ("frontliners", Category::NewNormal),
    ("social distancing", Category::NewNormal),
    ("work from home", Category::NewNormal),
];

impl KeywordRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// The fifteen Metro Manila COVID-19 search terms in five categories.
    pub fn default_set() -> Self {
        let mut registry = Self::new();
        for (keyword, category) in DEFAULT_KEYWORDS {
            registry.insert(keyword, category).expect("default set is unique");
        }
        registry
    }

    pub fn insert(&mut self, keyword: &str, category: Category) -> Result<(), RegistryError> {
        let keyword = normalize_keyword(keyword);
        if keyword.is_empty() {
            return Err(RegistryError::EmptyKeyword);
        }
        if self.index_of(&keyword).is_some() {
            return Err(RegistryError::DuplicateKeyword(keyword));
        }
        self.entries.push(KeywordEntry { keyword, category });
        Ok(())
    }

    /// Parses a `keyword,category` file. A leading header row is optional.
    pub fn from_csv(raw: &str) -> Result<Self, RegistryError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(raw.as_bytes());
        let mut registry = Self::new();
        for (i, record) in reader.records().enumerate() {
            let line = i + 1;
            let record = record.map_err(|_| RegistryError::Malformed { line })?;
            if record.iter().all(str::is_empty) {
                continue;
            }
            if record.len() != 2 {
                return Err(RegistryError::Malformed { line });
            }
            if line == 1 && record[0].eq_ignore_ascii_case("keyword") {
                continue;
            }
            registry.insert(&record[0], record[1].parse()?)?;
        }
        Ok(registry)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("keyword,category\n");
        for e in &self.entries {
            out.push_str(&format!("{},{}\n", e.keyword, e.category));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[KeywordEntry] {
        &self.entries
    }

    pub fn keywords(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.keyword.as_str())
    }

    pub fn index_of(&self, keyword: &str) -> Option<usize> {
        let keyword = normalize_keyword(keyword);
        self.entries.iter().position(|e| e.keyword == keyword)
    }

    pub fn category_of(&self, keyword: &str) -> Option<Category> {
        self.index_of(keyword).map(|i| self.entries[i].category)
    }
}

/// Search terms are case-insensitive.
pub fn normalize_keyword(keyword: &str) -> String {
    keyword.trim().to_lowercase()
}
