import pytest

from dova.errors import BackendUnavailable
from dova.routing import (
    SOURCE_ORDER,
    SOURCE_ROUTES,
    CallableSearchBackend,
    FixtureSearchBackend,
    QueryType,
    Source,
    SourceResult,
    classify,
    classify_scores,
    is_person,
    route_and_search,
    search_sources,
    slugify,
    sources_for,
)


class TestIsPerson:
    def test_who_is_with_capitalized_name(self):
        assert is_person("who is Grace Hopper")

    def test_who_was_with_capitalized_name(self):
        assert is_person("who was Alan Turing?")

    def test_who_is_lowercase_subject_is_not_person(self):
        assert not is_person("who is the tallest mountain named after")

    def test_honorific_fires(self):
        assert is_person("tell me about Dr. Hopper")

    def test_plain_question_is_not_person(self):
        assert not is_person("what is an embedding")


class TestClassify:
    def test_technical(self):
        assert classify("show me the algorithm implementation") is QueryType.TECHNICAL

    def test_news(self):
        assert classify("what was announced in the release") is QueryType.NEWS

    def test_biographical_gets_person_bonus(self):
        query = "who is Grace Hopper"
        scores = classify_scores(query)
        # "who is" counts once, the person bonus adds two
        assert scores[QueryType.BIOGRAPHICAL] == 3
        assert classify(query) is QueryType.BIOGRAPHICAL

    def test_factual(self):
        assert classify("what is a bloom filter") is QueryType.FACTUAL

    def test_all_zero_falls_to_general(self):
        assert classify("ramble ramble ramble") is QueryType.GENERAL

    def test_tie_resolved_by_priority(self):
        # one technical phrase and one news phrase: technical outranks news
        query = "news about the algorithm"
        scores = classify_scores(query)
        assert scores[QueryType.TECHNICAL] == scores[QueryType.NEWS] == 1
        assert classify(query) is QueryType.TECHNICAL

    def test_phrase_counting_is_substring_based(self):
        scores = classify_scores("define the code and the algorithm")
        assert scores[QueryType.TECHNICAL] == 2
        assert scores[QueryType.FACTUAL] == 1


class TestRoutes:
    def test_route_table(self):
        assert sources_for(QueryType.TECHNICAL) == SOURCE_ORDER
        assert sources_for(QueryType.NEWS) == (Source.WEB,)
        assert sources_for(QueryType.BIOGRAPHICAL) == (Source.WEB,)
        assert sources_for(QueryType.FACTUAL) == (Source.ARXIV, Source.WEB)
        assert sources_for(QueryType.GENERAL) == SOURCE_ORDER

    def test_routes_cover_every_type(self):
        assert set(SOURCE_ROUTES) == set(QueryType)


class TestSlugify:
    def test_lowercases_and_hyphenates(self):
        assert slugify("What's the Latest?") == "what-s-the-latest"

    def test_collapses_runs(self):
        assert slugify("a  --  b") == "a-b"

    def test_empty_falls_back(self):
        assert slugify("???") == "empty"


class TestFixtureBackend:
    def test_serves_ranked_results(self, fixtures_dir):
        fixtures_dir.write(
            "web",
            "grace-hopper",
            [
                {"title": "t1", "url": "u1", "snippet": "s1"},
                {"title": "t2", "url": "u2", "snippet": "s2"},
            ],
        )
        backend = FixtureSearchBackend(fixtures_dir)
        results = backend.search("Grace Hopper", Source.WEB)
        assert [r.rank for r in results] == [1, 2]
        assert results[0].title == "t1"
        assert results[0].source is Source.WEB

    def test_missing_file_is_empty(self, fixtures_dir):
        backend = FixtureSearchBackend(fixtures_dir)
        assert backend.search("unknown query", Source.ARXIV) == []

    def test_corrupt_file_raises_backend_unavailable(self, fixtures_dir):
        directory = fixtures_dir / "web"
        directory.mkdir(parents=True, exist_ok=True)
        (directory / "bad.json").write_text("{not json")
        backend = FixtureSearchBackend(fixtures_dir)
        with pytest.raises(BackendUnavailable):
            backend.search("bad", Source.WEB)


class TestSearchSources:
    def test_groups_in_source_order(self, fixtures_dir):
        fixtures_dir.write("web", "q", [{"title": "w", "url": "u", "snippet": "s"}])
        fixtures_dir.write("arxiv", "q", [{"title": "a", "url": "u", "snippet": "s"}])
        backend = FixtureSearchBackend(fixtures_dir)
        outcome = search_sources("q", (Source.WEB, Source.ARXIV), backend)
        flattened = outcome.flatten()
        # arxiv precedes web in the canonical order regardless of request order
        assert [r.source for r in flattened] == [Source.ARXIV, Source.WEB]

    def test_failures_isolated_per_source(self):
        def good(query):
            return [
                SourceResult(source=Source.WEB, title="t", url="u", snippet="s", rank=1)
            ]

        def bad(query):
            raise BackendUnavailable("down")

        backend = CallableSearchBackend({Source.WEB: good, Source.ARXIV: bad})
        outcome = search_sources("q", (Source.ARXIV, Source.WEB), backend)
        assert outcome.groups[Source.ARXIV] == []
        assert len(outcome.groups[Source.WEB]) == 1
        assert Source.ARXIV in outcome.errors
        assert "down" in outcome.errors[Source.ARXIV]

    def test_to_dict_shape(self):
        def good(query):
            return [
                SourceResult(source=Source.WEB, title="t", url="u", snippet="s", rank=1)
            ]

        backend = CallableSearchBackend({Source.WEB: good})
        payload = search_sources("q", (Source.WEB,), backend).to_dict()
        assert payload["groups"]["web"][0]["title"] == "t"
        assert payload["errors"] == {}


class TestRouteAndSearch:
    def test_biographical_searches_web_only(self, fixtures_dir):
        fixtures_dir.write(
            "web", "who-is-grace-hopper", [{"title": "t", "url": "u", "snippet": "s"}]
        )
        backend = FixtureSearchBackend(fixtures_dir)
        qtype, outcome = route_and_search("who is Grace Hopper", backend)
        assert qtype is QueryType.BIOGRAPHICAL
        assert list(outcome.groups) == [Source.WEB]

    def test_enabled_filter_restricts_routed_sources(self, fixtures_dir):
        backend = FixtureSearchBackend(fixtures_dir)
        qtype, outcome = route_and_search(
            "show me the algorithm implementation",
            backend,
            enabled=(Source.ARXIV,),
        )
        assert qtype is QueryType.TECHNICAL
        assert list(outcome.groups) == [Source.ARXIV]
