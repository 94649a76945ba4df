//! Synthetic pull requests with a known set of privacy violators.
//!
//! Clean PRs are ordinary code, configuration and docs sprinkled with
//! compliant near-misses (public figures, bare years, hashes, test card
//! numbers that fail Luhn). Violating PRs additionally carry at least one
//! private identifier.

use rand::seq::{index, IndexedRandom};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::corpus::sample_value;
use crate::error::{Error, Result};
use crate::model::EntityType;
use crate::resources::BUNDLED_LOCALES;
use crate::triage::{PrDocument, PrFile};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticPr {
    pub pr: PrDocument,
    /// Ground truth: the PR contains a real privacy violation.
    pub violating: bool,
}

const FUNCTIONS: &[&str] = &["parse_entries", "load_config", "merge_ranges", "render_table", "flush_queue", "retry_request"];
const MODULES: &[&str] = &["parser", "config", "ranges", "render", "queue", "http"];

const NEAR_MISSES: &[&str] = &[
    "Barack Obama was born on August 4, 1961.",
    "Historical events from 1776 included the Declaration of Independence.",
    "Copyright 2024 the project authors.",
    "Use the test card 4111 1111 1111 1112 to simulate a decline.",
    "Deployed to the Frankfurt region.",
    "Angela Merkel served as chancellor.",
    "Releases before 2019 are no longer supported.",
    "The default port is 8080 and the timeout is 30 seconds.",
];

fn hex(rng: &mut ChaCha8Rng, n: usize) -> String {
    (0..n).map(|_| char::from(*b"0123456789abcdef".choose(rng).expect("hex"))).collect()
}

fn rust_file(rng: &mut ChaCha8Rng) -> PrFile {
    let f = FUNCTIONS.choose(rng).expect("names");
    let m = MODULES.choose(rng).expect("names");
    let n = rng.random_range(3000..9000);
    let issue = rng.random_range(3000..99999);
    PrFile {
        path: format!("src/{m}.rs"),
        content: format!(
            "//! {m} helpers.\n\n\
             /// Counts at most {n} comma-separated entries (see issue #{issue}).\n\
             pub fn {f}(input: &str) -> usize {{\n    input.split(',').take({n}).count()\n}}\n\n\
             #[cfg(test)]\nmod tests {{\n    #[test]\n    fn handles_empty() {{\n        \
             assert_eq!(super::{f}(\"\"), 1);\n    }}\n}}\n"
        ),
    }
}

fn python_file(rng: &mut ChaCha8Rng) -> PrFile {
    let f = FUNCTIONS.choose(rng).expect("names");
    let m = MODULES.choose(rng).expect("names");
    let timeout = rng.random_range(3000..9000);
    PrFile {
        path: format!("tools/{m}.py"),
        content: format!(
            "import os\n\nTIMEOUT_MS = {timeout}\nDEFAULT_HOST = \"localhost\"\n\n\n\
             def {f}(path):\n    \"\"\"Read the file at path relative to the working directory.\"\"\"\n    \
             with open(os.path.join(os.getcwd(), path)) as fh:\n        return fh.read()\n"
        ),
    }
}

fn changelog(rng: &mut ChaCha8Rng) -> PrFile {
    let (a, b, c) = (rng.random_range(0..10), rng.random_range(10..40), rng.random_range(0..10));
    let sha = hex(rng, 40);
    let note = NEAR_MISSES.choose(rng).expect("notes");
    PrFile {
        path: "CHANGELOG.md".into(),
        content: format!(
            "# Changelog\n\n## v{a}.{b}.{c}\n\n\
             - Fixed a crash when the cache directory is missing.\n\
             - Reverted commit {sha} after a flaky test run.\n\
             - {note}\n"
        ),
    }
}

fn yaml_file(rng: &mut ChaCha8Rng) -> PrFile {
    let m = MODULES.choose(rng).expect("names");
    let port = rng.random_range(3000..9000);
    let uuid = format!("{}-{}-{}-{}-{}", hex(rng, 8), hex(rng, 4), hex(rng, 4), hex(rng, 4), hex(rng, 12));
    PrFile {
        path: format!("deploy/{m}.yaml"),
        content: format!(
            "service:\n  name: {m}\n  port: {port}\n  replicas: {}\n  instance_id: {uuid}\n",
            rng.random_range(3..9)
        ),
    }
}

fn notes_file(rng: &mut ChaCha8Rng) -> PrFile {
    let picks: Vec<&str> = NEAR_MISSES.sample(rng, 2).copied().collect();
    PrFile {
        path: "docs/notes.md".into(),
        content: format!("# Notes\n\n{}\n\n{}\n", picks[0], picks[1]),
    }
}

fn violation(rng: &mut ChaCha8Rng) -> PrFile {
    let locale = *BUNDLED_LOCALES.choose(rng).expect("locales");
    let pick = rng.random_range(0..8);
    let mut v = |ty| sample_value(rng, locale, ty);
    let (path, content) = match pick {
        0 => (
            "fixtures/users.json",
            format!(
                "{{\"name\": \"{}\", \"email\": \"{}\"}}\n",
                v(EntityType::Person),
                v(EntityType::EmailAddress)
            ),
        ),
        1 => (
            "tools/oncall.py",
            format!("# Page {} at {} if the job fails.\nJOB = \"nightly\"\n", v(EntityType::Person), v(EntityType::PhoneNumber)),
        ),
        2 => ("tests/payment_test.py", format!("CARD = \"{}\"\n", v(EntityType::CreditCard))),
        3 => ("tests/identity_test.py", format!("national_id = \"{}\"\n", v(EntityType::NationalId))),
        4 => ("deploy/secrets.env", format!("token = {}\n", v(EntityType::CredentialToken))),
        5 => ("fixtures/contacts.csv", "name,email,phone\nJohn Doe, john.doe@example.com, 123-456-7890\n".to_owned()),
        6 => ("docs/billing.md", format!("Refunds go to account {}.\n", v(EntityType::BankAccount))),
        _ => ("docs/example.md", "Customer Sherlock Holmes, 221B Baker Street, requested a refund.\n".to_owned()),
    };
    PrFile {
        path: path.into(),
        content,
    }
}

/// Generate `total` PRs of which exactly `violators` contain a violation,
/// at seed-determined positions. PR ids are `pr-0001` onwards.
pub fn generate_prs(seed: u64, total: usize, violators: usize) -> Result<Vec<SyntheticPr>> {
    if violators > total {
        return Err(Error::Argument(format!("{violators} violators exceed {total} PRs")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = vec![false; total];
    for i in index::sample(&mut rng, total, violators) {
        bad[i] = true;
    }
    let makers: [fn(&mut ChaCha8Rng) -> PrFile; 5] = [rust_file, python_file, changelog, yaml_file, notes_file];
    let mut out = Vec::with_capacity(total);
    for (i, violating) in bad.into_iter().enumerate() {
        let mut files: Vec<PrFile> = Vec::new();
        let k = rng.random_range(1..=3);
        for maker in makers.sample(&mut rng, k) {
            files.push(maker(&mut rng));
        }
        if violating {
            let f = violation(&mut rng);
            files.retain(|x| x.path != f.path);
            files.push(f);
        }
        out.push(SyntheticPr {
            pr: PrDocument::new(format!("pr-{:04}", i + 1), files)?,
            violating,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_determinism() {
        let a = generate_prs(3, 40, 5).unwrap();
        assert_eq!(a.len(), 40);
        assert_eq!(a.iter().filter(|p| p.violating).count(), 5);
        assert_eq!(a, generate_prs(3, 40, 5).unwrap());
        assert!(generate_prs(3, 2, 3).is_err());
    }
}
