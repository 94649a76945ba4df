//! Deterministic synthetic evaluation corpus.
//!
//! Every positive record holds exactly one entity embedded in a short
//! sentence in the locale's language; negative records hold a near-miss
//! (wrong checksum, malformed address, capitalized non-name) and no gold
//! entity. Identical seeds and specs produce identical corpora.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AnnotatedRecord, SpanLabel};
use crate::detectors::PatternRegistry;
use crate::error::{toml_load_error, Error, Result};
use crate::gazetteer::Gazetteer;
use crate::model::{EntityType, TextSpan};
use crate::resources::{BUNDLED_LEXICONS, BUNDLED_LOCALES, BUNDLED_SURNAMES};
use crate::validators::{
    cpf_check, cpf_complete, dni_check, dni_complete, iban_check, iban_complete, luhn_check, luhn_complete,
    nir_check, nir_complete, steuer_id_check, steuer_id_complete, verhoeff_check, verhoeff_complete,
};

/// Records per (locale, type) group, and the share of each group that is
/// negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub negative_fraction: f64,
    pub counts: BTreeMap<String, BTreeMap<EntityType, usize>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    negative_fraction: f64,
    per_group: Option<usize>,
    #[serde(default)]
    locales: Vec<String>,
    #[serde(default)]
    types: Vec<EntityType>,
    #[serde(default)]
    counts: BTreeMap<String, BTreeMap<EntityType, usize>>,
}

impl CorpusSpec {
    /// The same number of records for every locale and type.
    pub fn uniform(locales: &[&str], types: &[EntityType], per_group: usize, negative_fraction: f64) -> Result<Self> {
        let counts = locales
            .iter()
            .map(|l| (l.to_string(), types.iter().map(|t| (*t, per_group)).collect()))
            .collect();
        let spec = Self {
            negative_fraction,
            counts,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Every bundled locale and entity type, `per_group` records each.
    pub fn full(per_group: usize, negative_fraction: f64) -> Self {
        Self::uniform(&BUNDLED_LOCALES, &EntityType::ALL, per_group, negative_fraction)
            .expect("bundled locales are supported")
    }

    /// Parse a TOML spec. Either `per_group` (optionally narrowed by
    /// `locales` and `types`) or explicit `[counts.<locale>]` tables.
    pub fn parse(source: &str, content: &str) -> Result<Self> {
        let raw: RawSpec = toml::from_str(content).map_err(|e| toml_load_error(source, content, &e))?;
        let mut counts = raw.counts;
        if let Some(n) = raw.per_group {
            let locales: Vec<String> = if raw.locales.is_empty() {
                BUNDLED_LOCALES.iter().map(|s| s.to_string()).collect()
            } else {
                raw.locales
            };
            let types = if raw.types.is_empty() {
                EntityType::ALL.to_vec()
            } else {
                raw.types
            };
            for l in locales {
                let entry = counts.entry(l).or_default();
                for t in &types {
                    entry.entry(*t).or_insert(n);
                }
            }
        }
        let spec = Self {
            negative_fraction: raw.negative_fraction,
            counts,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&path.display().to_string(), &content)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.negative_fraction) {
            return Err(Error::Config(format!(
                "negative_fraction {} is outside [0, 1]",
                self.negative_fraction
            )));
        }
        if self.counts.is_empty() {
            return Err(Error::Config("corpus spec has no groups".into()));
        }
        for l in self.counts.keys() {
            if !BUNDLED_LOCALES.contains(&l.as_str()) {
                return Err(Error::UnknownLocale(l.clone()));
            }
        }
        Ok(())
    }

    pub fn total(&self) -> usize {
        self.counts.values().flat_map(|m| m.values()).sum()
    }

    /// Negatives in a group of `n` records.
    pub fn negatives_in(&self, n: usize) -> usize {
        ((n as f64) * self.negative_fraction).round() as usize
    }
}

/// Generate the corpus described by `spec`. Record ids are
/// `<locale>-<type>-<n>` for positives and `<locale>-<type>-neg-<n>` for
/// negatives. Locales without bundled material fall back to English.
pub fn generate_corpus(seed: u64, spec: &CorpusSpec) -> Vec<AnnotatedRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(spec.total());
    for (locale, groups) in &spec.counts {
        let lang = Lang::new(locale);
        for (&ty, &n) in groups {
            let negatives = spec.negatives_in(n).min(n);
            let tag = ty.name().to_lowercase();
            for i in 0..n - negatives {
                let (text, gold) = lang.positive(&mut rng, ty);
                out.push(record(format!("{locale}-{tag}-{i:04}"), text, ty, gold));
            }
            for i in 0..negatives {
                let text = lang.negative(&mut rng, ty);
                out.push(AnnotatedRecord {
                    record_id: format!("{locale}-{tag}-neg-{i:04}"),
                    text,
                    gold: Vec::new(),
                });
            }
        }
    }
    out
}

/// One positive surface of `ty` for `locale`, as placed in generated text.
pub(crate) fn sample_value(rng: &mut ChaCha8Rng, locale: &str, ty: EntityType) -> String {
    let (text, (s, e)) = Lang::new(locale).positive(rng, ty);
    text[s..e].to_owned()
}

fn record(record_id: String, text: String, ty: EntityType, gold: (usize, usize)) -> AnnotatedRecord {
    let surface = text[gold.0..gold.1].to_owned();
    AnnotatedRecord {
        record_id,
        gold: vec![SpanLabel {
            entity_type: ty,
            span: TextSpan::new(gold.0, gold.1),
            surface,
        }],
        text,
    }
}

/// Substitute `value` for the single `{}` in `template`, returning the text
/// and the byte span of the value.
fn fill(template: &str, value: &str) -> (String, (usize, usize)) {
    let at = template.find("{}").expect("template has a slot");
    let text = format!("{}{value}{}", &template[..at], &template[at + 2..]);
    (text, (at, at + value.len()))
}

fn lexicon_lines(content: &str) -> Vec<String> {
    content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_owned)
        .collect()
}

fn ascii_fold(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars().flat_map(char::to_lowercase) {
        match c {
            'á' | 'à' | 'â' | 'ã' | 'ä' => out.push('a'),
            'é' | 'è' | 'ê' | 'ë' => out.push('e'),
            'í' | 'ì' | 'î' | 'ï' => out.push('i'),
            'ó' | 'ò' | 'ô' | 'õ' | 'ö' => out.push('o'),
            'ú' | 'ù' | 'û' | 'ü' => out.push('u'),
            'ç' => out.push('c'),
            'ñ' => out.push('n'),
            'ß' => out.push_str("ss"),
            c if c.is_ascii_alphanumeric() => out.push(c),
            _ => {}
        }
    }
    out
}

fn digits(rng: &mut ChaCha8Rng, n: usize) -> String {
    (0..n).map(|_| char::from(b'0' + rng.random_range(0..10u8))).collect()
}

fn alnum(rng: &mut ChaCha8Rng, n: usize, alphabet: &[u8]) -> String {
    (0..n).map(|_| char::from(*alphabet.choose(rng).expect("non-empty"))).collect()
}

const UPPER_DIGITS: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
const ALNUM: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
const BASE64: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

fn group(s: &str, sizes: &[usize], sep: &str) -> String {
    let mut parts = Vec::new();
    let mut rest = s;
    for &n in sizes {
        let (a, b) = rest.split_at(n.min(rest.len()));
        parts.push(a);
        rest = b;
    }
    if !rest.is_empty() {
        parts.push(rest);
    }
    parts.join(sep)
}

fn group4(s: &str) -> String {
    s.as_bytes()
        .chunks(4)
        .map(|c| std::str::from_utf8(c).expect("ascii"))
        .collect::<Vec<_>>()
        .join(" ")
}

struct Templates {
    email: &'static [&'static str],
    phone: &'static [&'static str],
    card: &'static [&'static str],
    national_id: &'static [&'static str],
    date: &'static [&'static str],
    person: &'static [&'static str],
    location: &'static [&'static str],
    bank: &'static [&'static str],
    account_number: &'static [&'static str],
    credential: &'static [&'static str],
    neutral: &'static [&'static str],
}

const CREDENTIAL: &[&str] = &["token = {}", "api_key: \"{}\"", "Authorization header uses {} here."];

const EN: Templates = Templates {
    email: &["Please send the report to {}.", "You can reach the maintainer at {} for access."],
    phone: &["Call the front desk on {} after lunch.", "Phone: {}"],
    card: &["The card on file is {}.", "Card number {} was charged twice."],
    national_id: &["SSN: {}", "Her social security number is {}."],
    date: &["The contract was signed on {}.", "Delivery is expected by {}."],
    person: &["{} reviewed the pull request.", "Thanks to {} for the fix."],
    location: &["The team met in {} last spring.", "Ship the package to {} please."],
    bank: &["Wire the refund to IBAN {}.", "Payment goes to {} as agreed."],
    account_number: &["Please deposit it into account number {} today.", "Acct no. {} is overdrawn."],
    credential: CREDENTIAL,
    neutral: &["The log shows {} for this build.", "Reviewer note: {} looks fine."],
};

const DE: Templates = Templates {
    email: &["Bitte schicken Sie den Bericht an {}.", "Erreichbar unter {} bis Freitag."],
    phone: &["Telefon: {}", "Rufen Sie uns unter {} an."],
    card: &["Kreditkarte: {}", "Die Karte {} wurde belastet."],
    national_id: &["Steuer-ID: {}", "Meine Steueridentifikationsnummer lautet {}."],
    date: &["Der Vertrag wurde am {} unterschrieben.", "Lieferung bis {} geplant."],
    person: &["Laut {} ist das Release fertig.", "Gestern hat {} den Fehler behoben."],
    location: &["Das Treffen fand in {} statt.", "Die Lieferung geht nach {} morgen."],
    bank: &["IBAN: {}", "Bitte überweisen Sie auf {} bis Montag."],
    account_number: &["Kontonummer {} wurde gesperrt."],
    credential: CREDENTIAL,
    neutral: &["Im Protokoll steht {} für diesen Build.", "Hinweis: {} ist unverändert."],
};

const FR: Templates = Templates {
    email: &["Merci d'écrire à {} avant vendredi.", "Contact : {}"],
    phone: &["Téléphone : {}", "Appelez le {} en cas de besoin."],
    card: &["Carte bancaire : {}", "La carte {} a été débitée."],
    national_id: &["Numéro de sécurité sociale : {}", "NIR {} vérifié."],
    date: &["Le contrat a été signé le {}.", "Livraison prévue le {}."],
    person: &["Selon {}, la version est prête.", "Hier, {} a corrigé le bogue."],
    location: &["La réunion a eu lieu à {} hier.", "Le colis part pour {} demain."],
    bank: &["IBAN : {}", "Virement vers {} effectué."],
    account_number: &["Numéro de compte {} clôturé."],
    credential: CREDENTIAL,
    neutral: &["Le journal indique {} pour cette version.", "Remarque : {} reste inchangé."],
};

const ES: Templates = Templates {
    email: &["Escriba a {} antes del viernes.", "Correo: {}"],
    phone: &["Teléfono: {}", "Llame al {} por la tarde."],
    card: &["Tarjeta: {}", "La tarjeta {} fue rechazada."],
    national_id: &["DNI: {}", "Mi documento es {} según el registro."],
    date: &["El contrato se firmó el {}.", "La entrega está prevista para el {}."],
    person: &["Según {}, la versión está lista.", "Ayer {} corrigió el error."],
    location: &["La reunión fue en {} el lunes.", "El paquete va a {} mañana."],
    bank: &["IBAN: {}", "Transfiera a {} hoy."],
    account_number: &["Cuenta número {} bloqueada."],
    credential: CREDENTIAL,
    neutral: &["El registro muestra {} para esta versión.", "Nota: {} sin cambios."],
};

const PT: Templates = Templates {
    email: &["Envie o relatório para {} até sexta.", "E-mail: {}"],
    phone: &["Telefone: {}", "Ligue para {} à tarde."],
    card: &["Cartão: {}", "O cartão {} foi recusado."],
    national_id: &["CPF: {}", "Meu CPF é {} conforme o cadastro."],
    date: &["O contrato foi assinado em {}.", "A entrega está prevista para {}."],
    person: &["Segundo {}, a versão está pronta.", "Ontem {} corrigiu o erro."],
    location: &["A reunião foi em {} ontem.", "O pacote vai para {} amanhã."],
    bank: &["IBAN: {}", "Transfira para {} hoje."],
    account_number: &["Conta número {} encerrada."],
    credential: CREDENTIAL,
    neutral: &["O registro mostra {} para esta versão.", "Nota: {} sem alterações."],
};

const HI: Templates = Templates {
    email: &["Please mail the invoice to {} today.", "Email: {}"],
    phone: &["Mobile: {}", "Call me on {} tomorrow."],
    card: &["Card: {}", "The card {} was declined."],
    national_id: &["Aadhaar: {}", "My Aadhaar number is {}."],
    date: &["The meeting is on {}.", "Joining date is {}."],
    person: &["{} approved the change.", "Thanks to {} for testing."],
    location: &["The office is in {} now.", "Send the parcel to {} soon."],
    bank: &["Please credit account number {} today.", "Account no. {} is active."],
    account_number: &["Please credit account number {} today.", "Account no. {} is active."],
    credential: CREDENTIAL,
    neutral: &["The log shows {} for this build.", "Reviewer note: {} looks fine."],
};

/// Per-locale generation material.
struct Lang {
    locale: &'static str,
    templates: &'static Templates,
    first_names: Vec<String>,
    surnames: Vec<String>,
    /// Display spellings of the twelve months.
    months: Vec<Vec<String>>,
    cities: Vec<String>,
}

impl Lang {
    fn new(locale: &str) -> Self {
        let locale: &'static str = BUNDLED_LOCALES.iter().copied().find(|l| *l == locale).unwrap_or("en");
        let templates = match locale {
            "de" => &DE,
            "fr" => &FR,
            "es" => &ES,
            "pt" => &PT,
            "hi-IN" => &HI,
            _ => &EN,
        };
        let gaz = Gazetteer::bundled();
        let first_names: Vec<String> = BUNDLED_LEXICONS
            .iter()
            .filter(|(_, _, l, _)| *l == Some(locale))
            .flat_map(|(_, _, _, c)| lexicon_lines(c))
            .filter(|n| !is_devanagari(n))
            .collect();
        let surnames = BUNDLED_SURNAMES
            .iter()
            .filter(|(l, _)| *l == locale)
            .flat_map(|(_, c)| lexicon_lines(c))
            .collect();
        let months = PatternRegistry::bundled()
            .get(locale)
            .map(|lp| lp.months.clone())
            .unwrap_or_default();
        let all_locales = BUNDLED_LOCALES;
        let cities = BUNDLED_LEXICONS
            .iter()
            .filter(|(n, _, _, _)| n.ends_with("locations.txt"))
            .flat_map(|(_, _, _, c)| lexicon_lines(c))
            .filter(|c| locale == "hi-IN" || !is_devanagari(c))
            .filter(|c| !c.split_whitespace().any(|t| gaz.is_first_name(t, all_locales)))
            .filter(|c| !gaz.lookup_public_figure(c))
            .collect();
        Self {
            locale,
            templates,
            first_names,
            surnames,
            months,
            cities,
        }
    }

    fn pick<'a>(&self, rng: &mut ChaCha8Rng, options: &'a [&'a str]) -> &'a str {
        options.choose(rng).expect("non-empty template list")
    }

    fn positive(&self, rng: &mut ChaCha8Rng, ty: EntityType) -> (String, (usize, usize)) {
        let t = self.templates;
        match ty {
            EntityType::EmailAddress => {
                let v = self.email(rng);
                fill(self.pick(rng, t.email), &v)
            }
            EntityType::PhoneNumber => {
                let v = self.phone(rng);
                fill(self.pick(rng, t.phone), &v)
            }
            EntityType::CreditCard => {
                let v = card(rng, true);
                fill(self.pick(rng, t.card), &v)
            }
            EntityType::NationalId => {
                let v = self.national_id(rng, true);
                fill(self.pick(rng, t.national_id), &v)
            }
            EntityType::Date => {
                let v = self.date(rng);
                fill(self.pick(rng, t.date), &v)
            }
            EntityType::Person => {
                let v = self.person(rng);
                fill(self.pick(rng, t.person), &v)
            }
            EntityType::Location => {
                let v = self.location(rng);
                fill(self.pick(rng, t.location), &v)
            }
            EntityType::BankAccount => match self.iban_country() {
                Some(cc) if rng.random_bool(0.8) => {
                    let v = iban(rng, cc, true);
                    fill(self.pick(rng, t.bank), &v)
                }
                _ => {
                    let n = if self.locale == "hi-IN" { 11 } else { rng.random_range(8..=10) };
                    let v = nonzero_lead(rng, n);
                    fill(self.pick(rng, t.account_number), &v)
                }
            },
            EntityType::CredentialToken => {
                let v = credential(rng);
                fill(self.pick(rng, t.credential), &v)
            }
        }
    }

    fn negative(&self, rng: &mut ChaCha8Rng, ty: EntityType) -> String {
        let value = match ty {
            EntityType::EmailAddress => {
                let user = self.email_user(rng);
                match rng.random_range(0..4) {
                    0 => format!("{user} at example dot com"),
                    1 => format!("{user}@localhost"),
                    2 => format!("{user}(at)example.org"),
                    _ => format!("{user}[at]example.net"),
                }
            }
            EntityType::PhoneNumber => match rng.random_range(0..3) {
                0 => format!("ext. {}", rng.random_range(3000..10000)),
                1 => format!("{}-{}", rng.random_range(200..1000), rng.random_range(3000..10000)),
                _ => format!("order #{}", rng.random_range(30000..1_000_000)),
            },
            EntityType::CreditCard => card(rng, false),
            EntityType::NationalId => self.national_id(rng, false),
            EntityType::Date => match rng.random_range(0..3) {
                0 => format!(
                    "v{}.{}.{}",
                    rng.random_range(1..10),
                    rng.random_range(10..40),
                    rng.random_range(0..10)
                ),
                1 => format!("build {}", rng.random_range(3000..10000)),
                _ => format!("{} items", rng.random_range(100..1000)),
            },
            EntityType::Person => ["Foo Bar", "Lorem Ipsum", "Release Manager", "Build Server", "Acme Widgets"]
                .choose(rng)
                .expect("non-empty")
                .to_string(),
            EntityType::Location => ["a Parisian cafe", "the Londoner", "a Berliner style", "the Hamburger menu", "Texan BBQ"]
                .choose(rng)
                .expect("non-empty")
                .to_string(),
            EntityType::BankAccount => match self.iban_country() {
                Some(cc) if rng.random_bool(0.7) => iban(rng, cc, false),
                _ => format!("account {}", rng.random_range(30000..100000)),
            },
            EntityType::CredentialToken => match rng.random_range(0..3) {
                0 => alnum(rng, 40, b"0123456789abcdef"),
                1 => format!(
                    "{}-{}-{}-{}-{}",
                    alnum(rng, 8, b"0123456789abcdef"),
                    alnum(rng, 4, b"0123456789abcdef"),
                    alnum(rng, 4, b"0123456789abcdef"),
                    alnum(rng, 4, b"0123456789abcdef"),
                    alnum(rng, 12, b"0123456789abcdef")
                ),
                _ => "x".repeat(rng.random_range(24..40)),
            },
        };
        fill(self.pick(rng, self.templates.neutral), &value).0
    }

    fn first(&self, rng: &mut ChaCha8Rng) -> String {
        self.first_names.choose(rng).expect("first names").clone()
    }

    fn last(&self, rng: &mut ChaCha8Rng) -> String {
        self.surnames.choose(rng).expect("surnames").clone()
    }

    fn person(&self, rng: &mut ChaCha8Rng) -> String {
        let gaz = Gazetteer::bundled();
        loop {
            let name = format!("{} {}", self.first(rng), self.last(rng));
            if !gaz.lookup_public_figure(&name) {
                return name;
            }
        }
    }

    fn email_user(&self, rng: &mut ChaCha8Rng) -> String {
        let f = ascii_fold(&self.first(rng));
        let l = ascii_fold(&self.last(rng));
        match rng.random_range(0..3) {
            0 => format!("{f}.{l}"),
            1 => format!("{f}_{l}"),
            _ => format!("{}{l}{}", &f[..1], rng.random_range(10..100)),
        }
    }

    fn email(&self, rng: &mut ChaCha8Rng) -> String {
        let domains: &[&str] = match self.locale {
            "de" => &["beispiel.de", "firma.de"],
            "fr" => &["exemple.fr", "societe.fr"],
            "es" => &["ejemplo.es", "empresa.es"],
            "pt" => &["exemplo.com.br", "empresa.pt"],
            "hi-IN" => &["example.in", "company.co.in"],
            _ => &["example.com", "corp.example.org"],
        };
        format!("{}@{}", self.email_user(rng), domains.choose(rng).expect("domains"))
    }

    fn phone(&self, rng: &mut ChaCha8Rng) -> String {
        match self.locale {
            "de" => match rng.random_range(0..2) {
                0 => format!("0{} {}", rng.random_range(30..90), digits(rng, 8)),
                _ => format!("01{} {}", rng.random_range(50..80), digits(rng, 7)),
            },
            "fr" => {
                let lead = rng.random_range(1..10);
                let pairs: Vec<String> = (0..4).map(|_| digits(rng, 2)).collect();
                format!("0{lead} {}", pairs.join(" "))
            }
            "es" => format!("{}{} {} {}", rng.random_range(6..8), digits(rng, 2), digits(rng, 3), digits(rng, 3)),
            "pt" => format!("({}) 9{}-{}", rng.random_range(11..100), digits(rng, 4), digits(rng, 4)),
            "hi-IN" => format!("{}{} {}", rng.random_range(6..10), digits(rng, 4), digits(rng, 5)),
            _ => {
                let area = rng.random_range(201..990);
                let exch = rng.random_range(201..1000);
                match rng.random_range(0..2) {
                    0 => format!("{area}-{exch}-{}", digits(rng, 4)),
                    _ => format!("({area}) {exch}-{}", digits(rng, 4)),
                }
            }
        }
    }

    fn national_id(&self, rng: &mut ChaCha8Rng, valid: bool) -> String {
        match self.locale {
            "de" => {
                let full = loop {
                    // Nine distinct digits with one of them doubled.
                    let mut d: Vec<u8> = (0..10).collect();
                    d.shuffle(rng);
                    d[9] = d[rng.random_range(0..9)];
                    d.shuffle(rng);
                    let body: String = d.iter().map(|x| char::from(b'0' + x)).collect();
                    let full = steuer_id_complete(&body).expect("10 digits");
                    if steuer_id_check(&full).unwrap_or(false) {
                        break full;
                    }
                };
                let s = if valid { full } else { wrong_last(&full, |d| steuer_id_check(d).unwrap_or(false)) };
                if rng.random_bool(0.5) {
                    s
                } else {
                    group(&s, &[2, 3, 3, 3], " ")
                }
            }
            "fr" => {
                let body = format!(
                    "{}{:02}{:02}{:02}{:03}{:03}",
                    rng.random_range(1..3),
                    rng.random_range(0..100),
                    rng.random_range(1..13),
                    rng.random_range(1..96),
                    rng.random_range(1..1000),
                    rng.random_range(1..1000)
                );
                let full = nir_complete(&body).expect("13 digits");
                let s = if valid {
                    full
                } else {
                    let key: u32 = full[13..].parse().expect("digits");
                    let bad = format!("{body}{:02}", (key % 97) + 1);
                    debug_assert!(!nir_check(&bad).unwrap_or(true));
                    bad
                };
                group(&s, &[1, 2, 2, 2, 3, 3, 2], " ")
            }
            "es" => {
                let nie = rng.random_bool(0.3);
                let (prefix, number) = if nie {
                    let p = *["X", "Y", "Z"].choose(rng).expect("prefixes");
                    (p, digits(rng, 7))
                } else {
                    ("", digits(rng, 8))
                };
                let ok = dni_complete(&format!(
                    "{}{number}",
                    match prefix {
                        "X" => "0",
                        "Y" => "1",
                        "Z" => "2",
                        _ => "",
                    }
                ))
                .expect("8 digits");
                let letter = ok.chars().last().expect("letter");
                let letter = if valid {
                    letter
                } else {
                    let alt = b"TRWAGMYFPDXBNJZSQVHLCKE";
                    let i = alt.iter().position(|&c| char::from(c) == letter).expect("table letter");
                    char::from(alt[(i + 1) % alt.len()])
                };
                let s = format!("{prefix}{number}{letter}");
                debug_assert_eq!(dni_check(&s), valid);
                s
            }
            "pt" => {
                let full = loop {
                    let b = digits(rng, 9);
                    if let Ok(c) = cpf_complete(&b) {
                        if cpf_check(&c).unwrap_or(false) {
                            break c;
                        }
                    }
                };
                let s = if valid { full } else { wrong_last(&full, |d| cpf_check(d).unwrap_or(false)) };
                format!("{}.{}.{}-{}", &s[..3], &s[3..6], &s[6..9], &s[9..])
            }
            "hi-IN" => {
                let body = format!("{}{}", rng.random_range(2..10), digits(rng, 10));
                let full = verhoeff_complete(&body).expect("digits");
                if valid {
                    if rng.random_bool(0.5) {
                        group4(&full)
                    } else {
                        full
                    }
                } else {
                    wrong_last(&full, |d| verhoeff_check(d).unwrap_or(false))
                }
            }
            _ => {
                let area = if valid {
                    rng.random_range(1..666)
                } else {
                    *[0, 666, rng.random_range(900..1000)].choose(rng).expect("areas")
                };
                format!("{area:03}-{:02}-{:04}", rng.random_range(1..100), rng.random_range(1..10000))
            }
        }
    }

    fn month(&self, rng: &mut ChaCha8Rng, m: usize) -> String {
        let spellings = &self.months[m];
        if self.locale == "hi-IN" && rng.random_bool(0.3) {
            if let Some(s) = spellings.iter().find(|s| !s.is_ascii()) {
                return s.clone();
            }
        }
        spellings[0].clone()
    }

    fn date(&self, rng: &mut ChaCha8Rng) -> String {
        let d = rng.random_range(1..29u32);
        let m = rng.random_range(1..13u32);
        let y = rng.random_range(1950..2025u32);
        let named = rng.random_bool(0.6);
        if !named {
            return match self.locale {
                "en" => format!("{m:02}/{d:02}/{y}"),
                "de" => format!("{d:02}.{m:02}.{y}"),
                _ if rng.random_bool(0.2) => format!("{y}-{m:02}-{d:02}"),
                _ => format!("{d:02}/{m:02}/{y}"),
            };
        }
        let month = self.month(rng, (m - 1) as usize);
        match self.locale {
            "de" => format!("{d}. {month} {y}"),
            "fr" => format!("{d} {} {y}", month.to_lowercase()),
            "es" | "pt" => format!("{d} de {} de {y}", month.to_lowercase()),
            "hi-IN" => format!("{d} {month} {y}"),
            _ => {
                if rng.random_bool(0.5) {
                    format!("{month} {d}, {y}")
                } else {
                    format!("{d} {month} {y}")
                }
            }
        }
    }

    fn location(&self, rng: &mut ChaCha8Rng) -> String {
        if rng.random_bool(0.6) {
            return self.cities.choose(rng).expect("cities").clone();
        }
        let n = rng.random_range(1..200);
        let pick = |rng: &mut ChaCha8Rng, xs: &[&str]| xs.choose(rng).expect("names").to_string();
        match self.locale {
            "de" => format!(
                "{}{} {n}",
                pick(rng, &["Haupt", "Bahnhof", "Schiller", "Linden", "Garten", "Berg"]),
                pick(rng, &["straße", "weg", "platz", "allee"])
            ),
            "fr" => format!(
                "{n} {}",
                pick(rng, &["rue de la Paix", "rue du Commerce", "boulevard Saint-Germain", "avenue des Ternes", "place de la République"])
            ),
            "es" => format!(
                "{} {n}",
                pick(rng, &["Calle Mayor", "Calle de Alcalá", "Avenida de la Constitución", "Paseo del Prado", "Plaza Mayor"])
            ),
            "pt" => format!(
                "{}, {n}",
                pick(rng, &["Rua Augusta", "Rua das Flores", "Avenida da Liberdade", "Praça do Comércio"])
            ),
            "hi-IN" => format!(
                "{n} {}",
                pick(rng, &["Station Road", "Mall Road", "Church Road", "Shanti Nagar", "Green Park Colony"])
            ),
            _ => format!(
                "{n} {} {}",
                pick(rng, &["Baker", "Elm", "Maple", "Oak", "Cedar", "Harbor"]),
                pick(rng, &["Street", "Avenue", "Road", "Lane"])
            ),
        }
    }

    fn iban_country(&self) -> Option<&'static str> {
        match self.locale {
            "de" => Some("DE"),
            "fr" => Some("FR"),
            "es" => Some("ES"),
            "pt" => Some("PT"),
            "en" => Some("GB"),
            _ => None,
        }
    }
}

fn is_devanagari(s: &str) -> bool {
    s.chars().any(|c| ('\u{0900}'..='\u{097f}').contains(&c))
}

fn nonzero_lead(rng: &mut ChaCha8Rng, n: usize) -> String {
    format!("{}{}", rng.random_range(1..10), digits(rng, n - 1))
}

/// Replace the final digit so that `valid` no longer holds.
fn wrong_last(s: &str, valid: impl Fn(&str) -> bool) -> String {
    let head = &s[..s.len() - 1];
    let last = s.as_bytes()[s.len() - 1] - b'0';
    (1..10)
        .map(|k| format!("{head}{}", (last + k) % 10))
        .find(|c| !valid(c))
        .expect("some digit breaks the checksum")
}

fn card(rng: &mut ChaCha8Rng, valid: bool) -> String {
    let (prefix, len) = match rng.random_range(0..3) {
        0 => ("4".to_owned(), 16),
        1 => (format!("5{}", rng.random_range(1..6)), 16),
        _ => (format!("3{}", [4, 7].choose(rng).expect("amex")), 15),
    };
    let payload = format!("{prefix}{}", digits(rng, len - 1 - prefix.len()));
    let full = luhn_complete(&payload).expect("digits");
    let s = if valid { full } else { wrong_last(&full, |d| luhn_check(d).unwrap_or(false)) };
    match (len, rng.random_range(0..3)) {
        (15, 0) => s,
        (15, _) => group(&s, &[4, 6, 5], " "),
        (_, 0) => s,
        (_, 1) => group4(&s),
        _ => group(&s, &[4, 4, 4, 4], "-"),
    }
}

fn iban(rng: &mut ChaCha8Rng, country: &str, valid: bool) -> String {
    let bban = match country {
        "GB" => format!("{}{}", alnum(rng, 4, &UPPER_DIGITS[..26]), digits(rng, 14)),
        "DE" => digits(rng, 18),
        "FR" => digits(rng, 23),
        "ES" => digits(rng, 20),
        _ => digits(rng, 21),
    };
    let full = iban_complete(country, &bban).expect("well-formed parts");
    let s = if valid {
        full
    } else {
        // Every prefix the pattern could match must fail too.
        let check: u32 = full[2..4].parse().expect("check digits");
        (1..97)
            .map(|k| format!("{country}{:02}{bban}", (check + k) % 97 + 2))
            .find(|c| (15..=c.len()).all(|n| !iban_check(&c[..n])))
            .expect("some check digits fail")
    };
    if rng.random_bool(0.6) {
        group4(&s)
    } else {
        s
    }
}

fn credential(rng: &mut ChaCha8Rng) -> String {
    match rng.random_range(0..4) {
        0 => format!("ghp_{}", alnum(rng, 36, ALNUM)),
        1 => format!("AKIA{}", alnum(rng, 16, UPPER_DIGITS)),
        2 => format!("sk_live_{}", alnum(rng, 24, ALNUM)),
        _ => loop {
            let s = alnum(rng, 40, BASE64);
            let mixed = s.bytes().any(|b| b.is_ascii_digit()) && s.bytes().any(|b| b.is_ascii_alphabetic());
            if mixed && crate::detectors::shannon_entropy(&s) > 4.5 {
                break s;
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_well_formed() {
        let spec = CorpusSpec::full(10, 0.3);
        let a = generate_corpus(7, &spec);
        assert_eq!(a, generate_corpus(7, &spec));
        assert_ne!(a, generate_corpus(8, &spec));
        assert_eq!(a.len(), 540);
        let negatives = a.iter().filter(|r| r.gold.is_empty()).count();
        assert_eq!(negatives, 6 * 9 * 3);
        for r in &a {
            assert!(r.problems().is_empty(), "{:?}", r.problems());
        }
        let ids: std::collections::BTreeSet<&str> = a.iter().map(|r| r.record_id.as_str()).collect();
        assert_eq!(ids.len(), a.len());
    }

    #[test]
    fn generated_identifiers_pass_their_checksums() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for loc in BUNDLED_LOCALES {
            let lang = Lang::new(loc);
            for _ in 0..50 {
                let good = crate::validators::strip_to_digits(&lang.national_id(&mut rng, true));
                let bad = crate::validators::strip_to_digits(&lang.national_id(&mut rng, false));
                let check = |d: &str| match loc {
                    "de" => steuer_id_check(d).unwrap(),
                    "fr" => nir_check(d).unwrap(),
                    "pt" => cpf_check(d).unwrap(),
                    "hi-IN" => verhoeff_check(d).unwrap(),
                    _ => true,
                };
                if loc != "en" && loc != "es" {
                    assert!(check(&good), "{loc} {good}");
                    assert!(!check(&bad), "{loc} {bad}");
                }
            }
        }
        for _ in 0..50 {
            assert!(luhn_check(&crate::validators::strip_to_digits(&card(&mut rng, true))).unwrap());
            assert!(!luhn_check(&crate::validators::strip_to_digits(&card(&mut rng, false))).unwrap());
            assert!(iban_check(&iban(&mut rng, "DE", true).replace(' ', "")));
            assert!(!iban_check(&iban(&mut rng, "FR", false).replace(' ', "")));
        }
    }

    #[test]
    fn spec_parsing() {
        let s = CorpusSpec::parse("t", "negative_fraction = 0.3\nper_group = 4\nlocales = [\"en\", \"de\"]\n").unwrap();
        assert_eq!(s.total(), 2 * 9 * 4);
        let s = CorpusSpec::parse("t", "negative_fraction = 0.5\n[counts.fr]\nEmailAddress = 6\n").unwrap();
        assert_eq!(s.total(), 6);
        assert_eq!(s.negatives_in(6), 3);
        assert!(matches!(
            CorpusSpec::parse("t", "negative_fraction = 0.3\n[counts.xx]\nDate = 1\n"),
            Err(Error::UnknownLocale(_))
        ));
        assert!(CorpusSpec::parse("t", "negative_fraction = 1.5\nper_group = 1\n").is_err());
        assert!(matches!(CorpusSpec::parse("t", "negative_fraction = \n"), Err(Error::Load { line: 1, .. })));
    }
}
