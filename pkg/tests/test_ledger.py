"""Tests for the hash-chained public ledger."""

import json

import numpy as np
import pytest

from ppg.errors import ComponentOutOfRange, IndexOutOfRange, LedgerFileExists, LedgerFormatError, MalformedFilter
from ppg.ledger import (
    GENESIS_PREV_HASH,
    EntryKind,
    FinancialTx,
    Ledger,
    RedactedTx,
    VerifyStatus,
    derive_signing_key,
    public_key_hex,
    query,
    verify_chain,
    verify_file,
)


def populate(ledger: Ledger, count: int) -> Ledger:
    ledger.append_header(0, config_hash="00" * 32)
    for i in range(1, count):
        if i % 3 == 0:
            ledger.append_financial(
                FinancialTx(
                    amount=100 * i,
                    payer_body="treasury",
                    payee_label=f"vendor-{i % 7}",
                    category="services",
                    budget_line=f"BL-{i % 4}" if i % 5 else None,
                    executed_at=i * 10,
                ),
                i * 10,
            )
        else:
            ledger.append(
                {"proposal_id": f"P-{i % 5:04d}", "event": "VoteCast", "nullifier": f"{i:064x}"},
                EntryKind.GOVERNANCE_EVENT,
                i * 10,
            )
    return ledger


@pytest.fixture
def full_ledger(ledger):
    return populate(ledger, 200)


class TestAppend:
    def test_genesis_links_to_zero_hash(self, ledger):
        entry = ledger.append_header(0)
        assert entry.index == 0
        assert entry.prev_hash == GENESIS_PREV_HASH
        assert entry.body["scheme"] == "ed25519"
        assert entry.body["public_key"] == public_key_hex(ledger.key)

    def test_entries_chain(self, full_ledger):
        entries = full_ledger.entries
        for prev, entry in zip(entries, entries[1:]):
            assert entry.prev_hash == prev.entry_hash
            assert entry.index == prev.index + 1
        assert full_ledger.head == entries[-1].entry_hash

    def test_lines_are_canonical(self, full_ledger):
        for line in full_ledger.lines:
            decoded = json.loads(line)
            compact = json.dumps(decoded, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
            assert compact.encode("utf-8") == line

    def test_same_inputs_same_bytes(self, signing_key):
        a = populate(Ledger(key=signing_key), 20).to_bytes()
        b = populate(Ledger(key=derive_signing_key(11)), 20).to_bytes()
        assert a == b

    def test_file_backed_ledger(self, tmp_path, signing_key):
        path = tmp_path / "ledger.jsonl"
        ledger = populate(Ledger(key=signing_key, path=path), 10)
        assert path.read_bytes() == ledger.to_bytes()
        assert verify_file(path).ok
        loaded = Ledger.load(path)
        assert len(loaded) == 10
        assert loaded.head == ledger.head

    def test_existing_file_is_not_restarted(self, tmp_path, signing_key):
        path = tmp_path / "ledger.jsonl"
        populate(Ledger(key=signing_key, path=path), 5)
        before = path.read_bytes()
        with pytest.raises(LedgerFileExists):
            Ledger(key=signing_key, path=path)
        assert path.read_bytes() == before

        attached = Ledger.load(path, key=signing_key, attach=True)
        attached.append({"proposal_id": "P-0009", "event": "Submit"}, EntryKind.GOVERNANCE_EVENT, 99)
        assert len(Ledger.load(path)) == 6
        assert verify_file(path).ok

    def test_empty_file_is_reused(self, tmp_path, signing_key):
        path = tmp_path / "ledger.jsonl"
        path.write_bytes(b"")
        ledger = populate(Ledger(key=signing_key, path=path), 3)
        assert path.read_bytes() == ledger.to_bytes()


class TestFinancial:
    def test_unbudgeted_spending_is_flagged(self, ledger):
        entry = ledger.append_financial(
            FinancialTx(amount=0, payer_body="treasury", payee_label="x", category="misc"), 5
        )
        assert entry.body["flagged"] is True
        assert entry.body["authorised"] is False

    def test_budgeted_spending_is_authorised(self, ledger):
        entry = ledger.append_financial(
            FinancialTx(amount=10, payer_body="t", payee_label="x", category="c", budget_line="BL-1"), 5
        )
        assert entry.body["flagged"] is False

    def test_negative_amount(self):
        with pytest.raises(ComponentOutOfRange):
            FinancialTx(amount=-1, payer_body="t", payee_label="x", category="c")

    def test_late_publication_adds_warning(self, ledger):
        tx = FinancialTx(amount=5, payer_body="t", payee_label="x", category="c", executed_at=0)
        entry = ledger.append_financial(tx, 90_000)
        warning = ledger[entry.index + 1]
        assert warning.kind is EntryKind.WARNING
        assert warning.body["references"] == entry.index
        assert warning.body["delay_seconds"] == 90_000

    def test_publication_within_bound(self, ledger):
        tx = FinancialTx(amount=5, payer_body="t", payee_label="x", category="c", executed_at=0)
        ledger.append_financial(tx, 86_400)
        assert len(ledger) == 1

    def test_redacted_entry_keeps_classification_public(self, ledger):
        entry = ledger.append_redacted(
            RedactedTx(category="security", responsible_department="Police", legal_exemption="Art. 12(3)"),
            5,
        )
        assert entry.kind is EntryKind.REDACTED_TX
        assert entry.body["legal_exemption"] == "Art. 12(3)"
        assert "amount" not in entry.body

    def test_redaction_needs_exemption(self):
        with pytest.raises(LedgerFormatError):
            RedactedTx(category="security", responsible_department="Police", legal_exemption="")

    def test_correction_references_original(self, ledger):
        ledger.append_header(0)
        original = ledger.append_financial(
            FinancialTx(amount=5, payer_body="t", payee_label="x", category="c"), 1
        )
        correction = ledger.append_correction(original.index, {"amount": 50}, 2)
        assert correction.body == {
            "references": 1,
            "corrected_kind": "FinancialTx",
            "corrected_body": {"amount": 50},
        }
        assert ledger[1].body["amount"] == 5

    def test_correction_of_missing_entry(self, ledger):
        with pytest.raises(IndexOutOfRange):
            ledger.append_correction(3, {}, 0)


class TestVerify:
    def test_untampered_log_verifies(self, full_ledger):
        result = verify_chain(full_ledger.to_bytes())
        assert result.ok
        assert str(result) == "Ok"

    def test_empty_log_verifies(self):
        assert verify_chain(b"").ok

    def test_wrong_key(self, full_ledger):
        other = derive_signing_key(99).public_key()
        result = verify_chain(full_ledger.to_bytes(), other)
        assert result.status is VerifyStatus.BAD_SIGNATURE
        assert result.index == 0

    def test_dropped_entry_breaks_link(self, full_ledger):
        lines = full_ledger.lines
        del lines[10]
        assert str(verify_chain(lines)) == "BadLinkAt(10)"

    def test_swapped_entries_break_link(self, full_ledger):
        lines = full_ledger.lines
        lines[20], lines[21] = lines[21], lines[20]
        result = verify_chain(lines)
        assert result.status is VerifyStatus.BAD_LINK
        assert result.index == 20

    def test_edited_body_breaks_hash(self, full_ledger):
        lines = full_ledger.lines
        lines[50] = lines[50].replace(b"VoteCast", b"VoteCost")
        assert str(verify_chain(lines)) == "BadHashAt(50)"

    def test_truncated_final_line(self, full_ledger):
        data = full_ledger.to_bytes()[:-1]
        result = verify_chain(data)
        assert not result.ok
        assert result.index == 199

    def test_random_bit_flips_are_detected(self, full_ledger):
        data = full_ledger.to_bytes()
        rng = np.random.default_rng(7)
        for _ in range(1000):
            position = int(rng.integers(0, len(data)))
            bit = int(rng.integers(0, 8))
            mutated = bytearray(data)
            mutated[position] ^= 1 << bit
            result = verify_chain(bytes(mutated))
            line_index = data[:position].count(b"\n")
            assert not result.ok
            assert result.index <= line_index


class TestQuery:
    def test_filter_by_kind_and_proposal(self, full_ledger):
        votes = full_ledger.query({"kind": "GovernanceEvent", "proposal_id": "P-0001"})
        assert votes
        assert all(e.body["proposal_id"] == "P-0001" for e in votes)
        assert [e.index for e in votes] == sorted(e.index for e in votes)

    def test_time_range_is_half_open(self, full_ledger):
        hits = query(full_ledger.entries, {"from": 100, "to": 200})
        assert [e.timestamp for e in hits] == list(range(100, 200, 10))

    def test_budget_line(self, full_ledger):
        hits = full_ledger.query({"budget_line": "BL-1"})
        assert hits and all(e.kind is EntryKind.FINANCIAL_TX for e in hits)

    @pytest.mark.parametrize(
        "criteria",
        [{"colour": "red"}, {"kind": "Gossip"}, {"from": 10, "to": 5}, {"from": "yesterday"}],
    )
    def test_malformed_filter(self, full_ledger, criteria):
        with pytest.raises(MalformedFilter):
            full_ledger.query(criteria)

    def test_stats(self, full_ledger):
        stats = full_ledger.stats()
        assert stats["entries"] == 200
        assert stats["per_kind"]["Header"] == 1
        assert stats["per_kind"]["FinancialTx"] == 66
        assert stats["flagged_financial"] == sum(1 for i in range(3, 200, 3) if i % 5 == 0)
        assert stats["head"] == full_ledger.head.hex()
