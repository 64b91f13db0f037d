//! Prints the phrase grammar and checks a few sentences against it.

use edtl_cnl::cnl::{grammar_export, recognize, tokenize};

fn main() {
    print!("{}", grammar_export());
    println!();
    for text in [
        "After 'H and D', 'D' occurs now.",
        "After 'T', 'I' is valid forever.",
        "After 'T', 'R' must occur.",
    ] {
        let verdict =
            tokenize(text, false).and_then(|tokens| recognize(&tokens, text.len(), false));
        match verdict {
            Ok(()) => println!("ok:       {text}"),
            Err(e) => println!("rejected: {text}\n          {e}"),
        }
    }
}
