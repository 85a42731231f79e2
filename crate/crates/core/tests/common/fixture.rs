//! Synthetic search-interest exports with planted keyword blocks.
//!
//! Every keyword has a latent daily interest `50 + 12·(L_b + 0.3·ε_k)`
//! where `L_b` is an i.i.d. standard normal signal shared by its block and
//! `ε_k` is keyword-specific noise. Blocks are independent of each other.
//! Interest is then exported the way the search service does it: each
//! 31-day segment normalized to peak 100 and rounded, and a year-long weekly
//! export of weekly means normalized to peak 100.

use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use trendnet::series::{add_days, ymd, DateSpan};
use trendnet::KeywordRegistry;

pub const BLOCKS: usize = 3;
pub const BLOCK_SIZE: usize = 5;
pub const NOISE: f64 = 0.3;

pub struct Fixture {
    pub registry: KeywordRegistry,
    pub span: DateSpan,
    pub first_week: NaiveDate,
    pub weeks: usize,
    /// Latent interest per keyword, indexed from `first_week`.
    pub interest: Vec<Vec<f64>>,
}

pub fn block_of(keyword_index: usize) -> usize {
    keyword_index / BLOCK_SIZE
}

impl Fixture {
    pub fn planted_blocks(seed: u64) -> Self {
        let registry = KeywordRegistry::default_set();
        assert_eq!(registry.len(), BLOCKS * BLOCK_SIZE);
        let span = DateSpan::default_analysis();
        let first_week = ymd(2020, 3, 15);
        let weeks = 53;
        let days = weeks * 7;
        let mut rng = StdRng::seed_from_u64(seed);
        let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
        let latent: Vec<Vec<f64>> = (0..BLOCKS).map(|_| (0..days).map(|_| normal()).collect()).collect();
        let interest = (0..registry.len())
            .map(|k| {
                (0..days)
                    .map(|t| (50.0 + 12.0 * (latent[block_of(k)][t] + NOISE * normal())).max(1.0))
                    .collect()
            })
            .collect();
        Self {
            registry,
            span,
            first_week,
            weeks,
            interest,
        }
    }

    fn day_index(&self, date: NaiveDate) -> usize {
        (date - self.first_week).num_days() as usize
    }

    /// `(start, end)` of each daily segment: 31 days each, the last one cut at the span end.
    pub fn segments(&self) -> Vec<(NaiveDate, NaiveDate)> {
        let mut out = Vec::new();
        let mut start = self.span.start;
        while start <= self.span.end {
            let end = add_days(start, 30).min(self.span.end);
            out.push((start, end));
            start = add_days(end, 1);
        }
        out
    }

    pub fn daily_csv(&self, keyword: usize, segment: (NaiveDate, NaiveDate)) -> String {
        let (start, end) = segment;
        let range = self.day_index(start)..=self.day_index(end);
        let values = &self.interest[keyword][range];
        let peak = values.iter().cloned().fold(f64::MIN, f64::max);
        let name = &self.registry.entries()[keyword].keyword;
        let mut out = format!("Category: All categories\n\nDay,{name}: (Metro Manila)\n");
        for (i, v) in values.iter().enumerate() {
            let scaled = (100.0 * v / peak).round();
            let cell = if scaled < 1.0 {
                "<1".to_string()
            } else {
                format!("{scaled}")
            };
            out.push_str(&format!("{},{cell}\n", add_days(start, i as u64)));
        }
        out
    }

    pub fn weekly_csv(&self, keyword: usize) -> String {
        let means: Vec<f64> = self.interest[keyword]
            .chunks(7)
            .map(|w| w.iter().sum::<f64>() / w.len() as f64)
            .collect();
        let peak = means.iter().cloned().fold(f64::MIN, f64::max);
        let name = &self.registry.entries()[keyword].keyword;
        let mut out = format!("Category: All categories\n\nWeek,{name}: (Metro Manila)\n");
        for (i, m) in means.iter().enumerate() {
            out.push_str(&format!(
                "{},{}\n",
                add_days(self.first_week, 7 * i as u64),
                (100.0 * m / peak).round()
            ));
        }
        out
    }

    /// Writes `registry.csv`, `daily/<keyword>/<n>.csv` and `weekly/<keyword>.csv`.
    pub fn write_tree(&self, root: &Path) {
        fs::create_dir_all(root.join("weekly")).unwrap();
        fs::write(root.join("registry.csv"), self.registry.to_csv()).unwrap();
        for (k, entry) in self.registry.entries().iter().enumerate() {
            let dir = root.join("daily").join(&entry.keyword);
            fs::create_dir_all(&dir).unwrap();
            for (n, seg) in self.segments().into_iter().enumerate() {
                fs::write(dir.join(format!("{:02}.csv", n + 1)), self.daily_csv(k, seg)).unwrap();
            }
            fs::write(
                root.join("weekly").join(format!("{}.csv", entry.keyword)),
                self.weekly_csv(k),
            )
            .unwrap();
        }
    }
}
