//! Check-digit and structural validators over plain digit strings.
//!
//! Validators never normalize. Callers strip separators first; any non-digit
//! input is an argument error.

use crate::error::{Error, Result};

fn digits_of(input: &str) -> Result<Vec<u8>> {
    if input.is_empty() {
        return Err(Error::Argument("empty digit string".into()));
    }
    input
        .bytes()
        .map(|b| {
            if b.is_ascii_digit() {
                Ok(b - b'0')
            } else {
                Err(Error::Argument(format!(
                    "non-digit character {:?} in {input:?}",
                    b as char
                )))
            }
        })
        .collect()
}

/// Strips everything except ASCII digits.
pub fn strip_to_digits(s: &str) -> String {
    s.chars().filter(char::is_ascii_digit).collect()
}

const LUHN_DOUBLED: [u32; 10] = [0, 2, 4, 6, 8, 1, 3, 5, 7, 9];

fn luhn_sum(digits: &[u8], double_first_from_right: bool) -> u32 {
    digits
        .iter()
        .rev()
        .enumerate()
        .map(|(i, &d)| {
            if (i % 2 == 1) != double_first_from_right {
                LUHN_DOUBLED[d as usize]
            } else {
                u32::from(d)
            }
        })
        .sum()
}

/// Luhn mod-10 check.
pub fn luhn_check(digits: &str) -> Result<bool> {
    let d = digits_of(digits)?;
    Ok(luhn_sum(&d, false) % 10 == 0)
}

/// Appends the Luhn check digit to `payload`.
pub fn luhn_complete(payload: &str) -> Result<String> {
    let d = digits_of(payload)?;
    let check = (10 - luhn_sum(&d, true) % 10) % 10;
    Ok(format!("{payload}{check}"))
}

// Verhoeff: multiplication table of the dihedral group D5, the position
// permutation table, and the group inverse.
const VERHOEFF_D: [[u8; 10]; 10] = [
    [0, 1, 2, 3, 4, 5, 6, 7, 8, 9],
    [1, 2, 3, 4, 0, 6, 7, 8, 9, 5],
    [2, 3, 4, 0, 1, 7, 8, 9, 5, 6],
    [3, 4, 0, 1, 2, 8, 9, 5, 6, 7],
    [4, 0, 1, 2, 3, 9, 5, 6, 7, 8],
    [5, 9, 8, 7, 6, 0, 4, 3, 2, 1],
    [6, 5, 9, 8, 7, 1, 0, 4, 3, 2],
    [7, 6, 5, 9, 8, 2, 1, 0, 4, 3],
    [8, 7, 6, 5, 9, 3, 2, 1, 0, 4],
    [9, 8, 7, 6, 5, 4, 3, 2, 1, 0],
];

const VERHOEFF_P: [[u8; 10]; 8] = [
    [0, 1, 2, 3, 4, 5, 6, 7, 8, 9],
    [1, 5, 7, 6, 2, 8, 3, 0, 9, 4],
    [5, 8, 0, 3, 7, 9, 6, 1, 4, 2],
    [8, 9, 1, 6, 0, 4, 3, 5, 2, 7],
    [9, 4, 5, 3, 1, 2, 6, 8, 7, 0],
    [4, 2, 8, 6, 5, 7, 3, 9, 0, 1],
    [2, 7, 9, 3, 8, 0, 6, 4, 1, 5],
    [7, 0, 4, 6, 9, 1, 3, 2, 5, 8],
];

const VERHOEFF_INV: [u8; 10] = [0, 4, 3, 2, 1, 5, 6, 7, 8, 9];

fn verhoeff_state(digits: &[u8], offset: usize) -> u8 {
    digits
        .iter()
        .rev()
        .enumerate()
        .fold(0u8, |c, (i, &d)| {
            VERHOEFF_D[c as usize][VERHOEFF_P[(i + offset) % 8][d as usize] as usize]
        })
}

/// Verhoeff dihedral-group check.
pub fn verhoeff_check(digits: &str) -> Result<bool> {
    let d = digits_of(digits)?;
    Ok(verhoeff_state(&d, 0) == 0)
}

/// Appends the Verhoeff check digit to `payload`.
pub fn verhoeff_complete(payload: &str) -> Result<String> {
    let d = digits_of(payload)?;
    let check = VERHOEFF_INV[verhoeff_state(&d, 1) as usize];
    Ok(format!("{payload}{check}"))
}

/// US SSN structure: area not 000, 666 or 900-999; group not 00; serial
/// not 0000.
pub fn ssn_structure_check(digits: &str) -> Result<bool> {
    let d = digits_of(digits)?;
    if d.len() != 9 {
        return Err(Error::Argument(format!(
            "SSN must have 9 digits, got {}",
            d.len()
        )));
    }
    let area = &digits[0..3];
    let group = &digits[3..5];
    let serial = &digits[5..9];
    Ok(area != "000" && area != "666" && d[0] != 9 && group != "00" && serial != "0000")
}

/// German tax identification number (Steuer-ID): 11 digits, no leading zero,
/// exactly one digit of the first ten repeated (twice, or three times but not
/// all adjacent), and an ISO 7064 MOD 11,10 check digit.
pub fn steuer_id_check(digits: &str) -> Result<bool> {
    let d = digits_of(digits)?;
    if d.len() != 11 {
        return Err(Error::Argument(format!(
            "Steuer-ID must have 11 digits, got {}",
            d.len()
        )));
    }
    if d[0] == 0 {
        return Ok(false);
    }
    let body = &d[..10];
    let mut counts = [0u8; 10];
    for &x in body {
        counts[x as usize] += 1;
    }
    let repeated: Vec<usize> = (0..10).filter(|&x| counts[x] > 1).collect();
    if repeated.len() != 1 {
        return Ok(false);
    }
    let r = repeated[0] as u8;
    match counts[r as usize] {
        2 => {}
        3 => {
            if body.windows(3).any(|w| w.iter().all(|&x| x == r)) {
                return Ok(false);
            }
        }
        _ => return Ok(false),
    }
    Ok(mod11_10_check_digit(body) == d[10])
}

fn mod11_10_check_digit(body: &[u8]) -> u8 {
    let mut product = 10u32;
    for &x in body {
        let mut sum = (u32::from(x) + product) % 10;
        if sum == 0 {
            sum = 10;
        }
        product = (sum * 2) % 11;
    }
    let check = 11 - product;
    if check == 10 {
        0
    } else {
        check as u8
    }
}

/// Appends the MOD 11,10 check digit to a 10-digit Steuer-ID body. The body's
/// digit-frequency rule is not checked here.
pub fn steuer_id_complete(body: &str) -> Result<String> {
    let d = digits_of(body)?;
    if d.len() != 10 {
        return Err(Error::Argument("Steuer-ID body must have 10 digits".into()));
    }
    Ok(format!("{body}{}", mod11_10_check_digit(&d)))
}

/// IBAN mod-97 check over an already upper-cased, separator-free IBAN.
pub fn iban_check(iban: &str) -> bool {
    let bytes = iban.as_bytes();
    if !(15..=34).contains(&bytes.len())
        || !bytes[..2].iter().all(u8::is_ascii_uppercase)
        || !bytes[2..4].iter().all(u8::is_ascii_digit)
        || !bytes.iter().all(|b| b.is_ascii_uppercase() || b.is_ascii_digit())
    {
        return false;
    }
    let rearranged = bytes[4..].iter().chain(&bytes[..4]);
    let mut rem = 0u32;
    for &b in rearranged {
        if b.is_ascii_digit() {
            rem = (rem * 10 + u32::from(b - b'0')) % 97;
        } else {
            rem = (rem * 100 + u32::from(b - b'A' + 10)) % 97;
        }
    }
    rem == 1
}

/// Builds an IBAN from a country code and BBAN by computing the two check
/// digits. Input must be upper-case alphanumeric.
pub fn iban_complete(country: &str, bban: &str) -> Result<String> {
    let ok = country.len() == 2
        && country.bytes().all(|b| b.is_ascii_uppercase())
        && bban.bytes().all(|b| b.is_ascii_uppercase() || b.is_ascii_digit());
    if !ok {
        return Err(Error::Argument(format!("invalid IBAN parts `{country}` `{bban}`")));
    }
    let mut rem = 0u32;
    for b in bban.bytes().chain(country.bytes()).chain(*b"00") {
        rem = if b.is_ascii_digit() {
            (rem * 10 + u32::from(b - b'0')) % 97
        } else {
            (rem * 100 + u32::from(b - b'A' + 10)) % 97
        };
    }
    Ok(format!("{country}{:02}{bban}", 98 - rem))
}

/// French social security number (NIR): 13 digits followed by the key
/// `97 - (n mod 97)`. The first digit is the sex code, 1 or 2.
pub fn nir_check(digits: &str) -> Result<bool> {
    let d = digits_of(digits)?;
    if d.len() != 15 {
        return Ok(false);
    }
    Ok(matches!(d[0], 1 | 2) && nir_key(&d[..13]) == u32::from(d[13]) * 10 + u32::from(d[14]))
}

fn nir_key(body: &[u8]) -> u32 {
    let n = body.iter().fold(0u64, |acc, &x| acc * 10 + u64::from(x));
    97 - (n % 97) as u32
}

/// Appends the two-digit key to a 13-digit NIR body.
pub fn nir_complete(body: &str) -> Result<String> {
    let d = digits_of(body)?;
    if d.len() != 13 {
        return Err(Error::Argument("NIR body must have 13 digits".into()));
    }
    Ok(format!("{body}{:02}", nir_key(&d)))
}

const DNI_LETTERS: &[u8; 23] = b"TRWAGMYFPDXBNJZSQVHLCKE";

/// Spanish DNI (`12345678Z`) or NIE (`X1234567L`): the trailing letter is the
/// number modulo 23 looked up in a fixed table. NIE prefixes X, Y, Z stand
/// for 0, 1, 2.
pub fn dni_check(id: &str) -> bool {
    let id: String = id.chars().filter(|c| !matches!(c, ' ' | '-' | '.')).collect();
    let b = id.as_bytes();
    if b.len() != 9 || !b[8].is_ascii_uppercase() {
        return false;
    }
    let lead = match b[0] {
        b'X' => b'0',
        b'Y' => b'1',
        b'Z' => b'2',
        c => c,
    };
    let mut n = 0u32;
    for &c in std::iter::once(&lead).chain(&b[1..8]) {
        if !c.is_ascii_digit() {
            return false;
        }
        n = n * 10 + u32::from(c - b'0');
    }
    DNI_LETTERS[(n % 23) as usize] == b[8]
}

/// Appends the control letter to an 8-digit DNI number.
pub fn dni_complete(number: &str) -> Result<String> {
    let d = digits_of(number)?;
    if d.len() != 8 {
        return Err(Error::Argument("DNI number must have 8 digits".into()));
    }
    let n = d.iter().fold(0u32, |acc, &x| acc * 10 + u32::from(x));
    Ok(format!("{number}{}", DNI_LETTERS[(n % 23) as usize] as char))
}

fn cpf_digit(d: &[u8]) -> u8 {
    let w = d.len() as u32 + 1;
    let sum: u32 = d.iter().enumerate().map(|(i, &x)| u32::from(x) * (w - i as u32)).sum();
    let r = (sum * 10) % 11;
    if r == 10 { 0 } else { r as u8 }
}

/// Brazilian CPF: 9 digits followed by two mod-11 check digits. Numbers made
/// of a single repeated digit are rejected.
pub fn cpf_check(digits: &str) -> Result<bool> {
    let d = digits_of(digits)?;
    if d.len() != 11 || d.iter().all(|&x| x == d[0]) {
        return Ok(false);
    }
    Ok(cpf_digit(&d[..9]) == d[9] && cpf_digit(&d[..10]) == d[10])
}

/// Appends both check digits to a 9-digit CPF body.
pub fn cpf_complete(body: &str) -> Result<String> {
    let mut d = digits_of(body)?;
    if d.len() != 9 {
        return Err(Error::Argument("CPF body must have 9 digits".into()));
    }
    let a = cpf_digit(&d);
    d.push(a);
    let b = cpf_digit(&d);
    Ok(format!("{body}{a}{b}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn luhn_examples() {
        assert!(luhn_check("4111111111111111").unwrap());
        assert!(!luhn_check("4111111111111112").unwrap());
        assert!(luhn_check("0000000000000000").unwrap());
        assert!(luhn_check("79927398713").unwrap());
    }

    #[test]
    fn luhn_rejects_non_digits() {
        assert!(matches!(luhn_check("4111-1111"), Err(Error::Argument(_))));
        assert!(luhn_check("").is_err());
    }

    #[test]
    fn verhoeff_examples() {
        assert!(verhoeff_check("2363").unwrap());
        assert!(!verhoeff_check("2364").unwrap());
        assert!(verhoeff_check("0").unwrap());
        assert!(verhoeff_check("x").is_err());
    }

    #[test]
    fn completion_produces_valid_strings() {
        assert_eq!(luhn_complete("411111111111111").unwrap(), "4111111111111111");
        assert_eq!(verhoeff_complete("236").unwrap(), "2363");
        assert!(verhoeff_check(&verhoeff_complete("23456789012").unwrap()).unwrap());
    }

    #[test]
    fn ssn_examples() {
        assert!(ssn_structure_check("123456789").unwrap());
        assert!(!ssn_structure_check("000456789").unwrap());
        assert!(!ssn_structure_check("123450000").unwrap());
        assert!(!ssn_structure_check("666456789").unwrap());
        assert!(!ssn_structure_check("912456789").unwrap());
        assert!(!ssn_structure_check("123006789").unwrap());
        assert!(ssn_structure_check("12345678").is_err());
    }

    #[test]
    fn steuer_id_examples() {
        // Published sample identifier.
        assert!(steuer_id_check("86095742719").unwrap());
        assert!(!steuer_id_check("86095742718").unwrap());
        // leading zero
        assert!(!steuer_id_check("06095742719").unwrap());
        // no repeated digit in the body
        assert!(!steuer_id_check(&steuer_id_complete("1234567890").unwrap()).unwrap());
        assert!(steuer_id_check("123").is_err());
    }

    #[test]
    fn iban_examples() {
        assert!(iban_check("DE89370400440532013000"));
        assert!(iban_check("GB82WEST12345698765432"));
        assert!(!iban_check("DE89370400440532013001"));
        assert!(!iban_check("de89370400440532013000"));
        assert_eq!(iban_complete("DE", "370400440532013000").unwrap(), "DE89370400440532013000");
        assert_eq!(iban_complete("GB", "WEST12345698765432").unwrap(), "GB82WEST12345698765432");
    }

    #[test]
    fn nir_examples() {
        // 1 85 05 78 006 084, key 97 - (1850578006084 mod 97)
        let full = nir_complete("1850578006084").unwrap();
        assert_eq!(full.len(), 15);
        assert!(nir_check(&full).unwrap());
        assert!(!nir_check("185057800608400").unwrap());
        assert!(!nir_check(&format!("3{}", &full[1..])).unwrap());
    }

    #[test]
    fn dni_examples() {
        assert!(dni_check("12345678Z"));
        assert!(!dni_check("12345678A"));
        assert!(dni_check("X1234567L"));
        assert_eq!(dni_complete("00000000").unwrap(), "00000000T");
    }

    #[test]
    fn cpf_examples() {
        assert!(cpf_check("52998224725").unwrap());
        assert!(!cpf_check("52998224724").unwrap());
        assert!(!cpf_check("11111111111").unwrap());
        assert_eq!(cpf_complete("529982247").unwrap(), "52998224725");
    }
}
