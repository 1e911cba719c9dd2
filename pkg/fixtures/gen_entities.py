#!/usr/bin/env python3
"""Regenerate the committed fixture dump files in this directory.

Outputs entities.jsonl (classifiable records), concepts.jsonl (label-only
records for referenced ids), and property_labels.tsv (sidecar for the
label store). Deterministic; safe to re-run.
"""

import json
from pathlib import Path

HERE = Path(__file__).parent


def ref(qid):
    return {
        "mainsnak": {
            "snaktype": "value",
            "datavalue": {"type": "wikibase-entityid", "value": {"id": qid}},
        }
    }


def string(text):
    return {
        "mainsnak": {
            "snaktype": "value",
            "datavalue": {"type": "string", "value": text},
        }
    }


def time(iso):
    return {
        "mainsnak": {
            "snaktype": "value",
            "datavalue": {"type": "time", "value": {"time": iso, "precision": 11}},
        }
    }


def quantity(amount):
    return {
        "mainsnak": {
            "snaktype": "value",
            "datavalue": {"type": "quantity", "value": {"amount": amount}},
        }
    }


def coordinate(lat, lon):
    return {
        "mainsnak": {
            "snaktype": "value",
            "datavalue": {
                "type": "globecoordinate",
                "value": {"latitude": lat, "longitude": lon},
            },
        }
    }


def with_qualifiers(statement, **quals):
    out = dict(statement)
    out["qualifiers"] = {
        prop: [
            {
                "snaktype": "value",
                "datavalue": {"type": "wikibase-entityid", "value": {"id": qid}},
            }
        ]
        for prop, qid in quals.items()
    }
    return out


def entity(qid, label, description=None, claims=None, lang="en"):
    obj = {
        "id": qid,
        "type": "item",
        "labels": {lang: {"language": lang, "value": label}},
        "descriptions": {},
        "claims": {},
    }
    if description:
        obj["descriptions"]["en"] = {"language": "en", "value": description}
    for prop, statements in (claims or {}).items():
        obj["claims"][prop] = statements if isinstance(statements, list) else [statements]
    return obj


ENTITIES = [
    entity(
        "Q312",
        "Apple Inc.",
        "American multinational technology company",
        {
            "P31": [ref("Q6881511"), ref("Q4830453")],
            "P571": time("+1976-04-01T00:00:00Z"),
            "P856": string("https://www.apple.com/"),
            "P159": ref("Q171224"),
            "P17": ref("Q30"),
            "P1128": quantity("+164000"),
            "P1056": ref("Q2766"),
            "P112": [ref("Q19837"), ref("Q483382"), ref("Q332591")],
            "P127": ref("Q849363"),
            "P355": ref("Q1961036"),
            "P361": ref("Q507306"),
            "P463": ref("Q5154966"),
            "P169": ref("Q265852"),
            "P414": ref("Q82059"),
            "P276": ref("Q30"),
            "P495": ref("Q30"),
            "P740": ref("Q846421"),
            "P166": ref("Q1543268"),
            "P2283": ref("Q171888"),
            "P793": ref("Q134161"),
            "P2184": ref("Q848530"),
            "P859": ref("Q18543"),
            "P2002": string("Apple"),
            "P8687": quantity("+33000000"),
        },
    ),
    entity(
        "Q75503392",
        "James Humphrey Walwyn",
        "Royal Navy officer",
        {
            "P31": ref("Q5"),
            "P569": time("+1872-06-13T00:00:00Z"),
            "P106": with_qualifiers(ref("Q189290"), P241="Q172771"),
        },
    ),
    entity(
        "Q76",
        "Barack Obama",
        "44th president of the United States",
        {
            "P31": ref("Q5"),
            "P569": time("+1961-08-04T00:00:00Z"),
            "P39": ref("Q11696"),
            "P102": ref("Q29552"),
        },
    ),
    entity(
        "Q28058404",
        "Saquon Barkley",
        "American football player",
        {
            "P31": ref("Q5"),
            "P569": time("+1997-02-09T00:00:00Z"),
            "P641": ref("Q41323"),
            "P413": ref("Q1056437"),
            "P106": ref("Q19204627"),
        },
    ),
    entity("Q19837", "Steve Jobs", "American businessman", {"P31": ref("Q5")}),
    entity("Q483382", "Steve Wozniak", "American engineer", {"P31": ref("Q5")}),
    entity("Q332591", "Ronald Wayne", "American businessman", {"P31": ref("Q5")}),
    entity("Q265852", "Tim Cook", "American business executive", {"P31": ref("Q5")}),
    entity("Q10390", "John McCain", "American politician", {"P31": ref("Q5")}),
    entity("Q3772", "Quentin Tarantino", "American filmmaker", {"P31": ref("Q5")}),
    entity(
        "Q30",
        "United States",
        "country in North America",
        {
            "P31": ref("Q6256"),
            "P625": coordinate(39.828175, -98.5795),
            "P17": ref("Q30"),
            "P1082": quantity("+331000000"),
            "P6": ref("Q76"),
        },
    ),
    entity(
        "Q171224",
        "Cupertino",
        "city in California",
        {"P31": ref("Q515"), "P17": ref("Q30"), "P1082": quantity("+60381")},
    ),
    entity(
        "Q846421",
        "Los Altos",
        "city in California",
        {"P31": ref("Q515"), "P17": ref("Q30")},
    ),
    entity(
        "Q11696",
        "President of the United States",
        "head of state and government of the United States",
        {"P31": ref("Q4164871"), "P1001": ref("Q30")},
    ),
    entity(
        "Q29552",
        "Democratic Party",
        "political party in the United States",
        {"P31": ref("Q7278"), "P1142": ref("Q6216")},
    ),
    entity(
        "Q11201",
        "Supreme Court of the United States",
        "highest court of the United States",
        {"P31": ref("Q41487"), "P1001": ref("Q30")},
    ),
    entity(
        "Q29108",
        "2008 United States presidential election",
        "56th quadrennial U.S. presidential election",
        {
            "P31": ref("Q40231"),
            "P585": time("+2008-11-04T00:00:00Z"),
            "P726": [ref("Q76"), ref("Q10390")],
        },
    ),
    entity(
        "Q104123",
        "Pulp Fiction",
        "1994 film",
        {
            "P31": ref("Q11424"),
            "P577": time("+1994-05-21T00:00:00Z"),
            "P2047": quantity("+154"),
            "P57": ref("Q3772"),
        },
    ),
    entity(
        "Q18216",
        "aspirin",
        "medication",
        {
            "P31": ref("Q11173"),
            "P274": string("C9H8O4"),
            "P2067": quantity("+180.159"),
        },
    ),
    entity(
        "Q768073",
        "Final Cut Pro",
        "video editing software",
        {"P31": ref("Q7397"), "P176": ref("Q312"), "P348": string("10.6")},
    ),
    entity(
        "Q18543",
        "Major League Soccer",
        "professional soccer league",
        {"P31": ref("Q43229"), "P17": ref("Q30")},
    ),
]

# Label-only records: stub targets, qualifier values, and every id named by
# the routing schema. None carry type assertions, so they never classify.
CONCEPTS = {
    "Q5": "human",
    "Q515": "city",
    "Q6256": "country",
    "Q4022": "river",
    "Q23397": "lake",
    "Q11424": "film",
    "Q571": "book",
    "Q4164871": "position",
    "Q11862829": "academic discipline",
    "Q11173": "chemical compound",
    "Q12136": "disease",
    "Q7187": "gene",
    "Q6881511": "enterprise",
    "Q4830453": "business",
    "Q43229": "organization",
    "Q7278": "political party",
    "Q41487": "court",
    "Q198": "war",
    "Q40231": "public election",
    "Q7397": "software",
    "Q3231690": "automobile model",
    "Q189290": "military officer",
    "Q28640": "profession",
    "Q172771": "Royal Navy",
    "Q2766": "iPhone",
    "Q849363": "The Vanguard Group",
    "Q1961036": "Beats Electronics",
    "Q507306": "Nasdaq-100",
    "Q5154966": "Computer & Communications Industry Association",
    "Q82059": "Nasdaq",
    "Q1543268": "National Medal of Technology",
    "Q171888": "multi-touch",
    "Q134161": "initial public offering",
    "Q848530": "history of Apple Inc.",
    "Q6216": "liberalism",
    "Q41323": "American football",
    "Q1056437": "running back",
    "Q19204627": "American football player",
}

PROPERTY_LABELS = {
    "P6": "head of government",
    "P17": "country",
    "P21": "sex or gender",
    "P22": "father",
    "P25": "mother",
    "P26": "spouse",
    "P30": "continent",
    "P31": "instance of",
    "P35": "head of state",
    "P39": "position held",
    "P40": "child",
    "P50": "author",
    "P57": "director",
    "P69": "educated at",
    "P101": "field of work",
    "P102": "member of political party",
    "P106": "occupation",
    "P112": "founded by",
    "P127": "owned by",
    "P137": "operator",
    "P140": "religion or worldview",
    "P159": "headquarters location",
    "P166": "award received",
    "P169": "chief executive officer",
    "P176": "manufacturer",
    "P184": "doctoral advisor",
    "P185": "doctoral student",
    "P241": "military branch",
    "P274": "chemical formula",
    "P276": "location",
    "P279": "subclass of",
    "P348": "software version identifier",
    "P355": "subsidiary",
    "P361": "part of",
    "P400": "platform",
    "P413": "position played on team / speciality",
    "P414": "stock exchange",
    "P463": "member of",
    "P495": "country of origin",
    "P512": "academic degree",
    "P569": "date of birth",
    "P570": "date of death",
    "P571": "inception",
    "P577": "publication date",
    "P585": "point in time",
    "P607": "conflict",
    "P625": "coordinate location",
    "P641": "sport",
    "P684": "ortholog",
    "P710": "participant",
    "P726": "candidate",
    "P740": "location of formation",
    "P793": "significant event",
    "P803": "professorship",
    "P856": "official website",
    "P859": "sponsor",
    "P1001": "applies to jurisdiction",
    "P1056": "product or material produced",
    "P1082": "population",
    "P1092": "total produced",
    "P1104": "number of pages",
    "P1120": "number of deaths",
    "P1128": "employees",
    "P1142": "political ideology",
    "P1269": "facet of",
    "P1399": "convicted of",
    "P1416": "affiliation",
    "P1995": "health specialty",
    "P2002": "X username",
    "P2043": "length",
    "P2047": "duration",
    "P2067": "mass",
    "P2124": "member count",
    "P2176": "drug or therapy used for treatment",
    "P2184": "history of topic",
    "P2283": "uses",
    "P2579": "studied in",
    "P8687": "social media followers",
}


def main():
    with open(HERE / "entities.jsonl", "w", encoding="utf-8") as fh:
        for obj in ENTITIES:
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
    with open(HERE / "concepts.jsonl", "w", encoding="utf-8") as fh:
        for qid, label in CONCEPTS.items():
            fh.write(json.dumps(entity(qid, label), ensure_ascii=False) + "\n")
    with open(HERE / "property_labels.tsv", "w", encoding="utf-8") as fh:
        for pid, label in PROPERTY_LABELS.items():
            fh.write(f"{pid}\t{label}\n")
    print(f"wrote {len(ENTITIES)} entities, {len(CONCEPTS)} concepts")


if __name__ == "__main__":
    main()
