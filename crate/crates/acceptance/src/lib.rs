//! Holds the acceptance report; run it with
//! `cargo test -p oimso-acceptance --test acceptance`.
