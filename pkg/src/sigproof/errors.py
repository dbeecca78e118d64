"""Exception hierarchy shared across the package.

Every error carries a stable machine-readable ``code`` so the HTTP service
and the CLI can surface failures without string matching.
"""

from __future__ import annotations


class SigproofError(Exception):
    code = "internal_error"

    def __init__(self, message: str = "", detail: dict | None = None):
        super().__init__(message or self.code)
        self.detail = detail or {}


# -- corpus ------------------------------------------------------------

class UnreadableFile(SigproofError):
    code = "unreadable_file"


class UnsupportedFormat(SigproofError):
    code = "unsupported_format"


class DegenerateImage(SigproofError):
    code = "degenerate_image"


class EmptySignature(SigproofError):
    code = "empty_signature"


class UnknownLayout(SigproofError):
    code = "unknown_layout"


class EmptyCorpus(SigproofError):
    code = "empty_corpus"


class DuplicateEntry(SigproofError):
    code = "duplicate_entry"


# -- features ----------------------------------------------------------

class DimMismatch(SigproofError):
    code = "dim_mismatch"


class ChannelMismatch(SigproofError):
    code = "channel_mismatch"


class MalformedRecord(SigproofError):
    code = "malformed_record"


class NonFiniteFeature(SigproofError):
    code = "non_finite_feature"


class MissingChannel(SigproofError):
    code = "missing_channel"


# -- distances ---------------------------------------------------------

class ZeroVector(SigproofError):
    code = "zero_vector"


class EmptyVector(SigproofError):
    code = "empty_vector"


class UnknownMetric(SigproofError):
    code = "unknown_metric"


# -- universe model ----------------------------------------------------

class InsufficientCorpus(SigproofError):
    code = "insufficient_corpus"


class IoFailure(SigproofError):
    code = "io_failure"


class SchemaVersionMismatch(SigproofError):
    code = "schema_version_mismatch"


class UniverseTooSmall(SigproofError):
    code = "universe_too_small"


# -- evidence ----------------------------------------------------------

class EmptyPool(SigproofError):
    code = "empty_pool"


class ReferenceSetTooSmall(SigproofError):
    code = "reference_set_too_small"


class TooFewSamples(SigproofError):
    code = "too_few_samples"


class WeightMismatch(SigproofError):
    code = "weight_mismatch"


# -- evaluation --------------------------------------------------------

class InsufficientGenuine(SigproofError):
    code = "insufficient_genuine"


class InsufficientImpostors(SigproofError):
    code = "insufficient_impostors"


class EmptyScores(SigproofError):
    code = "empty_scores"


# -- service -----------------------------------------------------------

class CaseNotFound(SigproofError):
    code = "case_not_found"


class SpecimenNotFound(SigproofError):
    code = "specimen_not_found"


class MissingQuestioned(SigproofError):
    code = "missing_questioned"


class NoReferences(SigproofError):
    code = "no_references"


class UbmNotLoaded(SigproofError):
    code = "ubm_not_loaded"


class PayloadTooLarge(SigproofError):
    code = "payload_too_large"
