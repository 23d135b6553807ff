//! Hierarchical CCN names.
//!
//! A name is a sequence of opaque byte-string components written as
//! `/comp1/comp2/...`, with bytes outside printable ASCII (and the `/` and `%`
//! bytes themselves) percent-encoded as `%HH`.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NameError {
    #[error("name must start with '/'")]
    MissingLeadingSlash,
    #[error("empty component at byte offset {offset}")]
    EmptyComponent { offset: usize },
    #[error("malformed percent escape at byte offset {offset}")]
    BadEscape { offset: usize },
}

/// One non-empty name component.
///
/// Components order shortlex: shorter components first, equal lengths
/// bytewise.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Component(Vec<u8>);

impl Component {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Result<Self, NameError> {
        let bytes = bytes.into();
        if bytes.is_empty() {
            return Err(NameError::EmptyComponent { offset: 0 });
        }
        Ok(Component(bytes))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    fn write_escaped(&self, out: &mut String) {
        const HEX: &[u8; 16] = b"0123456789ABCDEF";
        for &b in &self.0 {
            if needs_escape(b) {
                out.push('%');
                out.push(HEX[(b >> 4) as usize] as char);
                out.push(HEX[(b & 0x0f) as usize] as char);
            } else {
                out.push(b as char);
            }
        }
    }
}

impl Ord for Component {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Component {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_escaped(&mut s);
        write!(f, "{s:?}")
    }
}

fn needs_escape(b: u8) -> bool {
    !(0x21..=0x7e).contains(&b) || b == b'/' || b == b'%'
}

fn hex_value(b: u8) -> Option<u8> {
    match b {
        b'0'..=b'9' => Some(b - b'0'),
        b'a'..=b'f' => Some(b - b'a' + 10),
        b'A'..=b'F' => Some(b - b'A' + 10),
        _ => None,
    }
}

/// A CCN name. The empty name is the root `/`.
///
/// `Ord` is the canonical CCN order: components compare shortlex one by one
/// and a proper prefix sorts before all of its extensions.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name {
    components: Vec<Component>,
}

impl Name {
    pub fn root() -> Self {
        Name::default()
    }

    pub fn from_components(components: Vec<Component>) -> Self {
        Name { components }
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_root(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_root()
    }

    pub fn push(&mut self, component: Component) {
        self.components.push(component);
    }

    /// The first `depth` components as a new name. `depth` is clamped to the
    /// name's length.
    pub fn truncated(&self, depth: usize) -> Name {
        let depth = depth.min(self.components.len());
        Name {
            components: self.components[..depth].to_vec(),
        }
    }

    /// Yields the name itself, then each shorter prefix down to the
    /// one-component prefix. The root is never yielded.
    pub fn prefixes(&self) -> impl Iterator<Item = Name> + '_ {
        (1..=self.components.len())
            .rev()
            .map(move |depth| self.truncated(depth))
    }

    /// True if `self` is a (proper or equal) prefix of `other`.
    pub fn is_prefix_of(&self, other: &Name) -> bool {
        other.components.starts_with(&self.components)
    }

    /// Serialized size in bytes: each component plus one type/length byte.
    pub fn encoded_size(&self) -> usize {
        self.components.iter().map(|c| c.len() + 1).sum()
    }
}

impl FromIterator<Component> for Name {
    fn from_iter<I: IntoIterator<Item = Component>>(iter: I) -> Self {
        Name {
            components: iter.into_iter().collect(),
        }
    }
}

impl FromStr for Name {
    type Err = NameError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let bytes = text.as_bytes();
        if bytes.first() != Some(&b'/') {
            return Err(NameError::MissingLeadingSlash);
        }
        if bytes.len() == 1 {
            return Ok(Name::root());
        }

        let mut components = Vec::new();
        let mut current = Vec::new();
        let mut start = 1;
        let mut i = 1;
        while i <= bytes.len() {
            match bytes.get(i) {
                None | Some(b'/') => {
                    if current.is_empty() {
                        return Err(NameError::EmptyComponent { offset: start });
                    }
                    components.push(Component(core::mem::take(&mut current)));
                    i += 1;
                    start = i;
                }
                Some(b'%') => {
                    let hi = bytes.get(i + 1).copied().and_then(hex_value);
                    let lo = bytes.get(i + 2).copied().and_then(hex_value);
                    match (hi, lo) {
                        (Some(hi), Some(lo)) => current.push(hi << 4 | lo),
                        _ => return Err(NameError::BadEscape { offset: i }),
                    }
                    i += 3;
                }
                Some(&b) => {
                    current.push(b);
                    i += 1;
                }
            }
        }
        Ok(Name { components })
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return f.write_str("/");
        }
        let mut out = String::new();
        for c in &self.components {
            out.push('/');
            c.write_escaped(&mut out);
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Name({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;
    use proptest::prelude::*;

    fn name(s: &str) -> Name {
        s.parse().unwrap()
    }

    fn comp(b: &[u8]) -> Component {
        Component::new(b.to_vec()).unwrap()
    }

    #[test]
    fn parses_command_marker_component() {
        let n = name("/de/fhluebeck/ac/%C1.getTemp");
        assert_eq!(n.len(), 4);
        assert_eq!(n.components()[3].as_bytes()[0], 0xC1);
        assert_eq!(&n.components()[3].as_bytes()[1..], b".getTemp");
    }

    #[test]
    fn parses_root_and_escaped_separator() {
        assert!(name("/").is_root());
        let n = name("/a/%2F");
        assert_eq!(n.components(), &[comp(b"a"), comp(b"/")]);
    }

    #[test]
    fn parse_errors() {
        assert_eq!("de".parse::<Name>(), Err(NameError::MissingLeadingSlash));
        assert_eq!("".parse::<Name>(), Err(NameError::MissingLeadingSlash));
        assert_eq!(
            "/a//b".parse::<Name>(),
            Err(NameError::EmptyComponent { offset: 3 })
        );
        assert!(matches!(
            "/a/".parse::<Name>(),
            Err(NameError::EmptyComponent { .. })
        ));
        assert_eq!(
            "/a%2".parse::<Name>(),
            Err(NameError::BadEscape { offset: 2 })
        );
        assert_eq!(
            "/a%zz".parse::<Name>(),
            Err(NameError::BadEscape { offset: 2 })
        );
        assert!(Component::new(Vec::new()).is_err());
    }

    #[test]
    fn formats_canonically() {
        let mut last = vec![0xC1];
        last.extend_from_slice(b".getTemp");
        let n = Name::from_components(vec![
            comp(b"de"),
            comp(b"fhluebeck"),
            comp(b"ac"),
            comp(&last),
        ]);
        assert_eq!(n.to_string(), "/de/fhluebeck/ac/%C1.getTemp");
        assert_eq!(Name::root().to_string(), "/");
        assert_eq!(
            Name::from_components(vec![comp(b"a/b")]).to_string(),
            "/a%2Fb"
        );
        assert_eq!(name("/sp%20ace/100%25").to_string(), "/sp%20ace/100%25");
        // lower-case escapes and escaped printable bytes re-encode canonically
        assert_eq!(name("/%c1%41").to_string(), "/%C1A");
    }

    #[test]
    fn shortlex_examples() {
        assert_eq!(name("/a/b").cmp(&name("/a/b/c")), Ordering::Less);
        assert_eq!(name("/ab").cmp(&name("/b")), Ordering::Greater);
        assert_eq!(name("/a/b").cmp(&name("/a/b")), Ordering::Equal);
        assert_eq!(name("/z").cmp(&name("/aa")), Ordering::Less);
    }

    #[test]
    fn prefixes_longest_first() {
        let got: Vec<String> = name("/a/b/c").prefixes().map(|n| n.to_string()).collect();
        assert_eq!(got, ["/a/b/c", "/a/b", "/a"]);
        assert_eq!(name("/a").prefixes().count(), 1);
        assert_eq!(name("/").prefixes().count(), 0);
    }

    #[test]
    fn encoded_sizes() {
        assert_eq!(name("/de/fhluebeck/ac").encoded_size(), 16);
        assert_eq!(name("/").encoded_size(), 0);
        assert_eq!(name("/abcd/efgh/ijkl").encoded_size(), 15);
    }

    fn arb_name() -> impl Strategy<Value = Name> {
        prop::collection::vec(prop::collection::vec(any::<u8>(), 1..6), 0..6)
            .prop_map(|cs| cs.into_iter().map(|c| Component::new(c).unwrap()).collect())
    }

    fn small_name() -> impl Strategy<Value = Name> {
        prop::collection::vec(prop::collection::vec(0u8..3, 1..3), 0..4)
            .prop_map(|cs| cs.into_iter().map(|c| Component::new(c).unwrap()).collect())
    }

    // Independent comparator: lexicographic over (len, bytes) tuples.
    fn brute_cmp(a: &Name, b: &Name) -> Ordering {
        let key = |n: &Name| -> Vec<(usize, Vec<u8>)> {
            n.components()
                .iter()
                .map(|c| (c.len(), c.as_bytes().to_vec()))
                .collect()
        };
        key(a).cmp(&key(b))
    }

    proptest! {
        #[test]
        fn format_parse_round_trip(n in arb_name()) {
            let text = n.to_string();
            prop_assert_eq!(text.parse::<Name>().unwrap(), n);
        }

        #[test]
        fn prefixes_truncate_tail(n in arb_name()) {
            let ps: Vec<Name> = n.prefixes().collect();
            prop_assert_eq!(ps.len(), n.len());
            for (i, p) in ps.iter().enumerate() {
                prop_assert_eq!(p.len(), n.len() - i);
                prop_assert_eq!(p.components(), &n.components()[..p.len()]);
                prop_assert!(p.is_prefix_of(&n));
            }
        }

        #[test]
        fn order_matches_brute_force(mut names in prop::collection::vec(small_name(), 0..12)) {
            names.sort();
            for i in 0..names.len() {
                for j in 0..names.len() {
                    prop_assert_eq!(names[i].cmp(&names[j]), brute_cmp(&names[i], &names[j]));
                    if i < j {
                        prop_assert_ne!(brute_cmp(&names[i], &names[j]), Ordering::Greater);
                    }
                }
            }
        }

        #[test]
        fn encoded_size_is_additive(a in arb_name(), b in arb_name()) {
            let joined: Name = a.components().iter().chain(b.components()).cloned().collect();
            prop_assert_eq!(joined.encoded_size(), a.encoded_size() + b.encoded_size());
        }
    }
}
