#![allow(dead_code)]

use posweight::corpus::RawDocument;
use posweight::{TagSet, TaggedDocument};
use posweight_oracle::TaggedTokens;

pub fn to_tagged(docs: &[(String, TaggedTokens)]) -> Vec<TaggedDocument> {
    let set = TagSet::default();
    docs.iter()
        .map(|(docno, toks)| {
            TaggedDocument::new(
                docno.clone(),
                toks.iter()
                    .map(|(s, t)| (s.clone(), set.get(t).expect("default tag"))),
            )
        })
        .collect()
}

pub fn to_raw(docs: &[(String, TaggedTokens)]) -> Vec<RawDocument> {
    docs.iter()
        .map(|(docno, toks)| RawDocument {
            docno: docno.clone(),
            tokens: toks.iter().map(|(s, _)| s.clone()).collect(),
        })
        .collect()
}

pub fn surfaces(docs: &[(String, TaggedTokens)]) -> Vec<(String, Vec<String>)> {
    docs.iter()
        .map(|(d, toks)| (d.clone(), toks.iter().map(|(s, _)| s.clone()).collect()))
        .collect()
}

pub fn token_lists(docs: &[(String, TaggedTokens)]) -> Vec<TaggedTokens> {
    docs.iter().map(|(_, t)| t.clone()).collect()
}
