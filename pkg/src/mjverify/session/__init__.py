"""Proof sessions: tree management, persistence, HTTP API."""

from .manager import Job, Session, SessionError, SessionStore
from .persistence import PersistenceError, RestoreDivergence, persist, restore
from .tree import LogEntry, ProofNode, ProofTree, describe_app
