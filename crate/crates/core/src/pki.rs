//! Endorser certificates: identity extraction, trust-store chain checks and
//! a small demo certificate authority for fixtures.

use std::str::FromStr;
use std::time::{Duration, SystemTime};

use der::asn1::{
    Ia5StringRef, ObjectIdentifier, PrintableStringRef, TeletexStringRef, Utf8StringRef,
};
use der::{Decode, Encode};
use rand::RngCore;
use rsa::pkcs1v15::{Signature, SigningKey, VerifyingKey};
use rsa::pkcs8::{DecodePublicKey, EncodePrivateKey, LineEnding};
use rsa::signature::Verifier;
use rsa::{RsaPrivateKey, RsaPublicKey};
use sha2::{Sha256, Sha384, Sha512};
use spki::SubjectPublicKeyInfoOwned;
use x509_cert::attr::AttributeTypeAndValue;
use x509_cert::builder::{Builder, CertificateBuilder, Profile};
use x509_cert::ext::pkix::name::GeneralName;
use x509_cert::ext::pkix::{BasicConstraints, ExtendedKeyUsage, KeyUsage, SubjectAltName};
use x509_cert::name::{Name, RdnSequence, RelativeDistinguishedName};
use x509_cert::serial_number::SerialNumber;
use x509_cert::time::{Time, Validity};
use x509_cert::Certificate;

use crate::error::{Error, Result};
use crate::signature::check_key_size;

const OID_ORGANIZATION: ObjectIdentifier = ObjectIdentifier::new_unwrap("2.5.4.10");
const OID_COMMON_NAME: ObjectIdentifier = ObjectIdentifier::new_unwrap("2.5.4.3");
const OID_RSA_ENCRYPTION: ObjectIdentifier = ObjectIdentifier::new_unwrap("1.2.840.113549.1.1.1");
const OID_SHA256_WITH_RSA: ObjectIdentifier = ObjectIdentifier::new_unwrap("1.2.840.113549.1.1.11");
const OID_SHA384_WITH_RSA: ObjectIdentifier = ObjectIdentifier::new_unwrap("1.2.840.113549.1.1.12");
const OID_SHA512_WITH_RSA: ObjectIdentifier = ObjectIdentifier::new_unwrap("1.2.840.113549.1.1.13");
const OID_BASIC_CONSTRAINTS: ObjectIdentifier = ObjectIdentifier::new_unwrap("2.5.29.19");
const OID_KEY_USAGE: ObjectIdentifier = ObjectIdentifier::new_unwrap("2.5.29.15");
const OID_KP_SERVER_AUTH: ObjectIdentifier = ObjectIdentifier::new_unwrap("1.3.6.1.5.5.7.3.1");

/// Who signed an asset, as read from their certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndorserIdentity {
    /// Subject organization, falling back to the common name.
    pub display_name: String,
    pub public_key: RsaPublicKey,
    pub certificate_der: Vec<u8>,
}

fn attribute_string(atv: &AttributeTypeAndValue) -> Option<String> {
    let value = &atv.value;
    if let Ok(s) = value.decode_as::<Utf8StringRef<'_>>() {
        return Some(s.as_str().to_owned());
    }
    if let Ok(s) = value.decode_as::<PrintableStringRef<'_>>() {
        return Some(s.as_str().to_owned());
    }
    if let Ok(s) = value.decode_as::<Ia5StringRef<'_>>() {
        return Some(s.as_str().to_owned());
    }
    if let Ok(s) = value.decode_as::<TeletexStringRef<'_>>() {
        return Some(s.as_str().to_owned());
    }
    None
}

fn first_attribute(name: &Name, oid: ObjectIdentifier) -> Option<String> {
    name.0
        .iter()
        .flat_map(|rdn| rdn.0.iter())
        .filter(|atv| atv.oid == oid)
        .find_map(attribute_string)
        .filter(|s| !s.trim().is_empty())
}

fn parse_certificate(der_bytes: &[u8]) -> Result<Certificate> {
    Certificate::from_der(der_bytes).map_err(|e| Error::MalformedCertificate(e.to_string()))
}

fn rsa_public_key(cert: &Certificate) -> Result<RsaPublicKey> {
    let spki = &cert.tbs_certificate.subject_public_key_info;
    if spki.algorithm.oid != OID_RSA_ENCRYPTION {
        return Err(Error::MalformedCertificate(format!(
            "unsupported public key algorithm {}",
            spki.algorithm.oid
        )));
    }
    let spki_der = spki
        .to_der()
        .map_err(|e| Error::MalformedCertificate(e.to_string()))?;
    let key = RsaPublicKey::from_public_key_der(&spki_der)
        .map_err(|e| Error::MalformedCertificate(e.to_string()))?;
    check_key_size(&key).map_err(|e| Error::MalformedCertificate(e.to_string()))?;
    Ok(key)
}

/// Reads the endorser's display name and RSA public key out of a DER certificate.
pub fn extract_endorser(certificate_der: &[u8]) -> Result<EndorserIdentity> {
    let cert = parse_certificate(certificate_der)?;
    let public_key = rsa_public_key(&cert)?;
    let subject = &cert.tbs_certificate.subject;
    let display_name = first_attribute(subject, OID_ORGANIZATION)
        .or_else(|| first_attribute(subject, OID_COMMON_NAME))
        .or_else(|| Some(subject.to_string()).filter(|s| !s.is_empty()))
        .ok_or_else(|| Error::MalformedCertificate("certificate subject carries no name".into()))?;
    Ok(EndorserIdentity {
        display_name,
        public_key,
        certificate_der: certificate_der.to_vec(),
    })
}

/// Splits PEM text into DER certificates. Non-PEM input is treated as one DER blob.
pub fn decode_certificates(bytes: &[u8]) -> Result<Vec<Vec<u8>>> {
    let text = match std::str::from_utf8(bytes) {
        Ok(t) if t.contains("-----BEGIN") => t,
        _ => {
            parse_certificate(bytes)?;
            return Ok(vec![bytes.to_vec()]);
        }
    };
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(start) = rest.find("-----BEGIN CERTIFICATE-----") {
        let block = &rest[start..];
        let end_marker = "-----END CERTIFICATE-----";
        let end = block
            .find(end_marker)
            .ok_or_else(|| Error::MalformedCertificate("unterminated PEM block".into()))?
            + end_marker.len();
        let (label, der_bytes) = der::pem::decode_vec(&block.as_bytes()[..end])
            .map_err(|e| Error::MalformedCertificate(e.to_string()))?;
        debug_assert_eq!(label, "CERTIFICATE");
        parse_certificate(&der_bytes)?;
        out.push(der_bytes);
        rest = &block[end..];
    }
    if out.is_empty() {
        return Err(Error::MalformedCertificate(
            "no CERTIFICATE PEM block found".into(),
        ));
    }
    Ok(out)
}

pub fn certificate_to_pem(der_bytes: &[u8]) -> String {
    der::pem::encode_string("CERTIFICATE", LineEnding::LF, der_bytes)
        .expect("PEM encoding of in-memory bytes")
}

/// How certificate time-validity failures are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TrustPolicy {
    /// Any expired or not-yet-valid certificate makes the endorser untrusted.
    Strict,
    /// Time-validity failures become warnings on an otherwise verified report.
    #[default]
    WarnOnExpiry,
}

/// Root certificates a verifier accepts as anchors.
#[derive(Debug, Clone, Default)]
pub struct TrustStore {
    roots: Vec<TrustedRoot>,
    pub policy: TrustPolicy,
    /// Instant at which validity periods are evaluated; `None` means now.
    pub at: Option<SystemTime>,
}

#[derive(Debug, Clone)]
struct TrustedRoot {
    der: Vec<u8>,
    cert: Certificate,
    key: RsaPublicKey,
}

impl TrustStore {
    pub fn new(policy: TrustPolicy) -> Self {
        TrustStore {
            roots: Vec::new(),
            policy,
            at: None,
        }
    }

    pub fn with_time(mut self, at: SystemTime) -> Self {
        self.at = Some(at);
        self
    }

    pub fn add_root_der(&mut self, der_bytes: &[u8]) -> Result<()> {
        let cert = parse_certificate(der_bytes)?;
        let key = rsa_public_key(&cert)?;
        if !self.roots.iter().any(|r| r.der == der_bytes) {
            self.roots.push(TrustedRoot {
                der: der_bytes.to_vec(),
                cert,
                key,
            });
        }
        Ok(())
    }

    /// Adds every certificate found in PEM text (or a single DER blob).
    pub fn add_roots_pem(&mut self, pem: &[u8]) -> Result<usize> {
        let ders = decode_certificates(pem)?;
        for der_bytes in &ders {
            self.add_root_der(der_bytes)?;
        }
        Ok(ders.len())
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn root_ders(&self) -> impl Iterator<Item = &[u8]> {
        self.roots.iter().map(|r| r.der.as_slice())
    }

    fn now(&self) -> SystemTime {
        self.at.unwrap_or_else(SystemTime::now)
    }
}

/// Outcome of a successful chain check.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChainValidation {
    pub warnings: Vec<String>,
}

fn validity_problem(cert: &Certificate, at: SystemTime, what: &str) -> Option<String> {
    let validity = &cert.tbs_certificate.validity;
    let not_before = validity.not_before.to_system_time();
    let not_after = validity.not_after.to_system_time();
    if at < not_before {
        Some(format!(
            "{what} certificate is not valid before {}",
            validity.not_before
        ))
    } else if at > not_after {
        Some(format!(
            "{what} certificate expired at {}",
            validity.not_after
        ))
    } else {
        None
    }
}

fn find_extension(cert: &Certificate, oid: ObjectIdentifier) -> Option<&[u8]> {
    cert.tbs_certificate
        .extensions
        .as_ref()?
        .iter()
        .find(|ext| ext.extn_id == oid)
        .map(|ext| ext.extn_value.as_bytes())
}

fn verify_issued_by(child: &Certificate, issuer_key: &RsaPublicKey) -> bool {
    let Ok(tbs) = child.tbs_certificate.to_der() else {
        return false;
    };
    let Some(sig_bytes) = child.signature.as_bytes() else {
        return false;
    };
    let Ok(sig) = Signature::try_from(sig_bytes) else {
        return false;
    };
    let key = issuer_key.clone();
    match child.signature_algorithm.oid {
        oid if oid == OID_SHA256_WITH_RSA => {
            VerifyingKey::<Sha256>::new(key).verify(&tbs, &sig).is_ok()
        }
        oid if oid == OID_SHA384_WITH_RSA => {
            VerifyingKey::<Sha384>::new(key).verify(&tbs, &sig).is_ok()
        }
        oid if oid == OID_SHA512_WITH_RSA => {
            VerifyingKey::<Sha512>::new(key).verify(&tbs, &sig).is_ok()
        }
        _ => false,
    }
}

fn usable_as_ca(cert: &Certificate) -> bool {
    match find_extension(cert, OID_BASIC_CONSTRAINTS) {
        Some(value) => BasicConstraints::from_der(value)
            .map(|bc| bc.ca)
            .unwrap_or(false),
        None => true,
    }
}

fn usable_for_signing(cert: &Certificate) -> bool {
    match find_extension(cert, OID_KEY_USAGE) {
        Some(value) => KeyUsage::from_der(value)
            .map(|ku| ku.digital_signature() || ku.non_repudiation())
            .unwrap_or(false),
        None => true,
    }
}

/// Checks that `leaf_der` is a trust root itself or is issued directly by one.
///
/// Returns the rejection reason on failure. Time-validity problems are
/// warnings under [`TrustPolicy::WarnOnExpiry`].
pub fn validate_chain(
    leaf_der: &[u8],
    trust: &TrustStore,
) -> std::result::Result<ChainValidation, String> {
    if trust.is_empty() {
        return Err("trust store is empty".into());
    }
    let leaf = parse_certificate(leaf_der).map_err(|e| e.to_string())?;
    if !usable_for_signing(&leaf) {
        return Err("endorser certificate key usage does not permit signing".into());
    }
    let at = trust.now();

    let anchor = if let Some(root) = trust.roots.iter().find(|r| r.der == leaf_der) {
        root
    } else {
        let issuer = &leaf.tbs_certificate.issuer;
        let candidates: Vec<&TrustedRoot> = trust
            .roots
            .iter()
            .filter(|r| &r.cert.tbs_certificate.subject == issuer)
            .collect();
        if candidates.is_empty() {
            return Err(format!("issuer '{issuer}' is not in the trust store"));
        }
        candidates
            .into_iter()
            .filter(|r| usable_as_ca(&r.cert))
            .find(|r| verify_issued_by(&leaf, &r.key))
            .ok_or_else(|| {
                "endorser certificate signature does not verify under any trusted root".to_string()
            })?
    };

    let mut problems = Vec::new();
    problems.extend(validity_problem(&leaf, at, "endorser"));
    if anchor.der != leaf_der {
        problems.extend(validity_problem(&anchor.cert, at, "root"));
    }
    match trust.policy {
        TrustPolicy::Strict if !problems.is_empty() => Err(problems.join("; ")),
        _ => Ok(ChainValidation { warnings: problems }),
    }
}

/// Subject fields for issued certificates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SubjectName {
    pub organization: Option<String>,
    pub common_name: Option<String>,
}

impl SubjectName {
    pub fn organization(name: impl Into<String>) -> Self {
        SubjectName {
            organization: Some(name.into()),
            common_name: None,
        }
    }

    pub fn common_name(name: impl Into<String>) -> Self {
        SubjectName {
            organization: None,
            common_name: Some(name.into()),
        }
    }

    fn to_name(&self) -> Result<Name> {
        let mut rdns = Vec::new();
        for (oid, value) in [
            (OID_ORGANIZATION, &self.organization),
            (OID_COMMON_NAME, &self.common_name),
        ] {
            let Some(value) = value else { continue };
            let utf8 = Utf8StringRef::new(value).map_err(|e| Error::Issuance(e.to_string()))?;
            let atv = AttributeTypeAndValue {
                oid,
                value: der::Any::encode_from(&utf8).map_err(|e| Error::Issuance(e.to_string()))?,
            };
            let set = der::asn1::SetOfVec::try_from(vec![atv])
                .map_err(|e| Error::Issuance(e.to_string()))?;
            rdns.push(RelativeDistinguishedName(set));
        }
        Ok(RdnSequence(rdns))
    }
}

/// Validity period for issued certificates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidityWindow {
    pub not_before: SystemTime,
    pub not_after: SystemTime,
}

impl ValidityWindow {
    /// Starts one hour in the past, to tolerate clock skew, and lasts `days`.
    pub fn days_from_now(days: u64) -> Self {
        let now = SystemTime::now();
        ValidityWindow {
            not_before: now - Duration::from_secs(3600),
            not_after: now + Duration::from_secs(days * 86_400),
        }
    }

    fn to_validity(self) -> Result<Validity> {
        // Second precision keeps UTCTime/GeneralizedTime encodable.
        let trunc = |t: SystemTime| {
            let secs = t
                .duration_since(SystemTime::UNIX_EPOCH)
                .map_err(|_| Error::Issuance("validity before 1970".into()))?
                .as_secs();
            Ok::<_, Error>(SystemTime::UNIX_EPOCH + Duration::from_secs(secs))
        };
        Ok(Validity {
            not_before: Time::try_from(trunc(self.not_before)?)
                .map_err(|e| Error::Issuance(e.to_string()))?,
            not_after: Time::try_from(trunc(self.not_after)?)
                .map_err(|e| Error::Issuance(e.to_string()))?,
        })
    }
}

fn random_serial() -> Result<SerialNumber> {
    let mut bytes = [0u8; 16];
    rand::thread_rng().fill_bytes(&mut bytes);
    bytes[0] = (bytes[0] & 0x7f) | 0x01;
    SerialNumber::new(&bytes).map_err(|e| Error::Issuance(e.to_string()))
}

/// Generates a fresh RSA key of the given size.
pub fn generate_key(bits: usize) -> Result<RsaPrivateKey> {
    RsaPrivateKey::new(&mut rand::thread_rng(), bits).map_err(|e| Error::InvalidKey(e.to_string()))
}

pub fn private_key_to_pem(key: &RsaPrivateKey) -> String {
    key.to_pkcs8_pem(LineEnding::LF)
        .expect("PKCS#8 encoding of an in-memory key")
        .to_string()
}

/// A certificate together with its private key.
#[derive(Debug, Clone)]
pub struct IssuedCertificate {
    pub certificate_der: Vec<u8>,
    pub key: RsaPrivateKey,
}

impl IssuedCertificate {
    pub fn certificate_pem(&self) -> String {
        certificate_to_pem(&self.certificate_der)
    }

    pub fn key_pem(&self) -> String {
        private_key_to_pem(&self.key)
    }
}

/// A self-signed root able to issue endorser and server certificates.
#[derive(Debug, Clone)]
pub struct DemoCa {
    root: IssuedCertificate,
    name: Name,
}

impl DemoCa {
    pub fn generate(subject: &SubjectName, validity: ValidityWindow) -> Result<Self> {
        Self::generate_with_key(subject, validity, generate_key(2048)?)
    }

    pub fn generate_with_key(
        subject: &SubjectName,
        validity: ValidityWindow,
        key: RsaPrivateKey,
    ) -> Result<Self> {
        check_key_size(&key.to_public_key())?;
        let name = subject.to_name()?;
        let signer = SigningKey::<Sha256>::new(key.clone());
        let spki = SubjectPublicKeyInfoOwned::from_key(key.to_public_key())
            .map_err(|e| Error::Issuance(e.to_string()))?;
        let builder = CertificateBuilder::new(
            Profile::Root,
            random_serial()?,
            validity.to_validity()?,
            name.clone(),
            spki,
            &signer,
        )
        .map_err(|e| Error::Issuance(e.to_string()))?;
        let cert = builder
            .build::<Signature>()
            .map_err(|e| Error::Issuance(e.to_string()))?;
        let certificate_der = cert.to_der().map_err(|e| Error::Issuance(e.to_string()))?;
        Ok(DemoCa {
            root: IssuedCertificate {
                certificate_der,
                key,
            },
            name,
        })
    }

    /// Reloads a root from its certificate and key.
    pub fn from_parts(certificate_der: Vec<u8>, key: RsaPrivateKey) -> Result<Self> {
        let cert = parse_certificate(&certificate_der)?;
        if rsa_public_key(&cert)? != key.to_public_key() {
            return Err(Error::InvalidKey(
                "key does not match the root certificate".into(),
            ));
        }
        Ok(DemoCa {
            name: cert.tbs_certificate.subject.clone(),
            root: IssuedCertificate {
                certificate_der,
                key,
            },
        })
    }

    pub fn certificate_der(&self) -> &[u8] {
        &self.root.certificate_der
    }

    pub fn certificate_pem(&self) -> String {
        self.root.certificate_pem()
    }

    pub fn key(&self) -> &RsaPrivateKey {
        &self.root.key
    }

    /// Issues an endorser certificate for a freshly generated key.
    pub fn issue(
        &self,
        subject: &SubjectName,
        validity: ValidityWindow,
    ) -> Result<IssuedCertificate> {
        self.issue_with_key(subject, validity, generate_key(2048)?)
    }

    pub fn issue_with_key(
        &self,
        subject: &SubjectName,
        validity: ValidityWindow,
        key: RsaPrivateKey,
    ) -> Result<IssuedCertificate> {
        self.issue_leaf(subject, validity, key, &[])
    }

    /// Issues a TLS server certificate covering the given DNS names and IP addresses.
    pub fn issue_server(
        &self,
        hosts: &[String],
        validity: ValidityWindow,
    ) -> Result<IssuedCertificate> {
        let cn = hosts.first().cloned().unwrap_or_else(|| "localhost".into());
        self.issue_leaf(
            &SubjectName::common_name(cn),
            validity,
            generate_key(2048)?,
            hosts,
        )
    }

    fn issue_leaf(
        &self,
        subject: &SubjectName,
        validity: ValidityWindow,
        key: RsaPrivateKey,
        hosts: &[String],
    ) -> Result<IssuedCertificate> {
        check_key_size(&key.to_public_key())?;
        let signer = SigningKey::<Sha256>::new(self.root.key.clone());
        let spki = SubjectPublicKeyInfoOwned::from_key(key.to_public_key())
            .map_err(|e| Error::Issuance(e.to_string()))?;
        let profile = Profile::Leaf {
            issuer: self.name.clone(),
            enable_key_agreement: false,
            enable_key_encipherment: !hosts.is_empty(),
        };
        let mut builder = CertificateBuilder::new(
            profile,
            random_serial()?,
            validity.to_validity()?,
            subject.to_name()?,
            spki,
            &signer,
        )
        .map_err(|e| Error::Issuance(e.to_string()))?;
        if !hosts.is_empty() {
            let names = hosts
                .iter()
                .map(|h| match std::net::IpAddr::from_str(h) {
                    Ok(std::net::IpAddr::V4(ip)) => Ok(GeneralName::IpAddress(
                        der::asn1::OctetString::new(ip.octets().to_vec())
                            .map_err(|e| Error::Issuance(e.to_string()))?,
                    )),
                    Ok(std::net::IpAddr::V6(ip)) => Ok(GeneralName::IpAddress(
                        der::asn1::OctetString::new(ip.octets().to_vec())
                            .map_err(|e| Error::Issuance(e.to_string()))?,
                    )),
                    Err(_) => Ok(GeneralName::DnsName(
                        der::asn1::Ia5String::new(h).map_err(|e| Error::Issuance(e.to_string()))?,
                    )),
                })
                .collect::<Result<Vec<_>>>()?;
            builder
                .add_extension(&SubjectAltName(names))
                .map_err(|e| Error::Issuance(e.to_string()))?;
            builder
                .add_extension(&ExtendedKeyUsage(vec![OID_KP_SERVER_AUTH]))
                .map_err(|e| Error::Issuance(e.to_string()))?;
        }
        let cert = builder
            .build::<Signature>()
            .map_err(|e| Error::Issuance(e.to_string()))?;
        Ok(IssuedCertificate {
            certificate_der: cert.to_der().map_err(|e| Error::Issuance(e.to_string()))?,
            key,
        })
    }
}

/// A demo root plus one endorser issued by it.
#[derive(Debug, Clone)]
pub struct DemoChain {
    pub ca: DemoCa,
    pub endorser: IssuedCertificate,
}

impl DemoChain {
    pub fn root_der(&self) -> &[u8] {
        self.ca.certificate_der()
    }

    pub fn endorser_der(&self) -> &[u8] {
        &self.endorser.certificate_der
    }

    pub fn endorser_key(&self) -> &RsaPrivateKey {
        &self.endorser.key
    }

    /// A trust store anchored at this chain's root.
    pub fn trust_store(&self, policy: TrustPolicy) -> TrustStore {
        let mut trust = TrustStore::new(policy);
        trust
            .add_root_der(self.root_der())
            .expect("demo root is a well-formed RSA certificate");
        trust
    }
}

/// Generates a root CA and an endorser certificate with subject O=`endorser_name`.
pub fn issue_demo_chain(endorser_name: &str) -> Result<DemoChain> {
    if endorser_name.trim().is_empty() {
        return Err(Error::Issuance("endorser name must not be empty".into()));
    }
    let ca = DemoCa::generate(
        &SubjectName {
            organization: Some(endorser_name.to_owned()),
            common_name: Some(format!("{endorser_name} Demo Root CA")),
        },
        ValidityWindow::days_from_now(3650),
    )?;
    let endorser = ca.issue(
        &SubjectName::organization(endorser_name),
        ValidityWindow::days_from_now(825),
    )?;
    Ok(DemoChain { ca, endorser })
}
