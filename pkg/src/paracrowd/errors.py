"""Exception hierarchy for the paraphrase collection pipeline."""


class ParacrowdError(Exception):
    """Base class for all errors raised by this package."""

    code = "error"

    def __init__(self, message: str = ""):
        super().__init__(message or self.__doc__)
        self.message = message or (self.__doc__ or self.code)


# --- bracket tree ingestion ---

class EmptyInput(ParacrowdError):
    """Input is empty where content is required."""
    code = "empty_input"


class UnbalancedBrackets(ParacrowdError):
    """Bracket expression has mismatched or leftover parentheses."""
    code = "unbalanced_brackets"


class MalformedNode(ParacrowdError):
    """Tree node is missing a label, or mixes subtrees with bare tokens."""
    code = "malformed_node"


# --- text utilities ---

class InvalidN(ParacrowdError):
    """N-gram order must be at least 1."""
    code = "invalid_n"


# --- diversity metrics ---

class EmptyCorpus(ParacrowdError):
    """Metric requires a nonempty corpus with at least one token."""
    code = "empty_corpus"


class EmptyCandidate(ParacrowdError):
    """PINC candidate side must be nonempty."""
    code = "empty_candidate"


class GroupTooSmall(ParacrowdError):
    """Pairwise diversity needs at least two paraphrases per group."""
    code = "group_too_small"


class MissingPattern(ParacrowdError):
    """Record lacks a syntactic pattern where one is required."""
    code = "missing_pattern"


# --- pattern selection ---

class EmptyTable(ParacrowdError):
    """Pattern frequency table is empty."""
    code = "empty_table"


class NoMembers(ParacrowdError):
    """A requested pattern has no member paraphrases."""
    code = "no_members"


class EmptyPool(ParacrowdError):
    """Word sampling pool is empty after exclusions."""
    code = "empty_pool"


class InvalidM(ParacrowdError):
    """Sample size must be at least 1."""
    code = "invalid_m"


# --- prompt construction / validation ---

class MissingSelectionData(ParacrowdError):
    """Condition demands exemplars or words the selection did not provide."""
    code = "missing_selection_data"


# --- pipeline ---

class NoSeeds(ParacrowdError):
    """Round has no seed utterances."""
    code = "no_seeds"


class PoolExhausted(ParacrowdError):
    """Fewer workers available than workers_per_seed requires."""
    code = "pool_exhausted"


class InsufficientJudgments(ParacrowdError):
    """Record does not carry the required number of judgments."""
    code = "insufficient_judgments"


class EmptyCurated(ParacrowdError):
    """Seed selection requires a nonempty curated collection."""
    code = "empty_curated"


class TooFewRecords(ParacrowdError):
    """Outlier scoring needs at least two records."""
    code = "too_few_records"


class BankExhausted(ParacrowdError):
    """Simulated worker bank cannot supply enough eligible drafts."""
    code = "bank_exhausted"


# --- service ---

class NoActiveRound(ParacrowdError):
    """No round is currently open for task assignment."""
    code = "no_active_round"


class RoundAlreadyOpen(ParacrowdError):
    """A round is already open; advance it before starting another."""
    code = "round_already_open"


class UnknownTask(ParacrowdError):
    """Task id does not match any open task."""
    code = "unknown_task"


class TaskExpired(ParacrowdError):
    """Task assignment has expired."""
    code = "task_expired"


class WrongCount(ParacrowdError):
    """Submission does not contain exactly n_required drafts."""
    code = "wrong_count"


class DuplicateJudge(ParacrowdError):
    """Judge already judged this record."""
    code = "duplicate_judge"


class UnknownRecord(ParacrowdError):
    """Record id does not match any record."""
    code = "unknown_record"


class AlreadyFinalized(ParacrowdError):
    """Record already left the unverified state."""
    code = "already_finalized"


# --- storage / cli ---

class ExperimentError(ParacrowdError):
    """Experiment directory is missing or inconsistent."""
    code = "experiment_error"
