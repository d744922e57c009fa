# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Smoke test for the lcn_py extension module."""

import math

import lcn_py

SCENARIO = """
seed = 1
duration_days = 7
background_accounts = 300
background_rate = 0.3
"""
for size in (3, 5, 7):
    SCENARIO += f'[[implant]]\nstrategy = "boost"\ngroup_size = {size}\nevents = 10\n'


def main():
    assert lcn_py.normalize_url("HTTPS://Www.Example.com/a/#frag") == ("https://www.example.com/a", True)
    assert lcn_py.window_of(1800, 15) == 2
    assert math.isclose(lcn_py.text_similarity("abcde", "abcdef"), 1 / math.sqrt(2))

    g = lcn_py.Lcn([("a", "b", 10), ("a", "c", 10), ("b", "c", 10), ("d", "e", 1), ("d", "f", 1), ("e", "f", 1)])
    assert g.mean_edge_weight() == 5.5
    assert sorted(map(sorted, lcn_py.louvain(g, seed=0))) == [["a", "b", "c"], ["d", "e", "f"]]
    hccs = lcn_py.fsa_v(g, theta=0.3)
    assert [h.members for h in hccs] == [["a", "b", "c"]] and hccs[0].mew == 10.0
    assert len(lcn_py.knn_extract(g)) == 2
    assert len(lcn_py.threshold_extract(g, 0.9)) == 2

    corpus, truth = lcn_py.generate_scenario(SCENARIO)
    interactions, malformed = lcn_py.extract_interactions(corpus)
    assert interactions and not malformed

    found = lcn_py.detect(corpus, gamma=15, criteria="co_retweet", method="fsa_v", theta=0.3)
    precision, recall, f1 = lcn_py.score_detection(truth, [h.members for h in found])
    assert f1 is not None and f1 >= 0.9, (precision, recall, f1)

    lcn = lcn_py.Lcn.from_corpus(corpus, gamma=15, criteria="co_retweet")
    assert lcn.edge_count > 0

    members = found[0].members
    entropy = lcn_py.feature_entropy(corpus, members)
    assert entropy["retweeted_accounts"] == 0.0
    irr, _ = lcn_py.internal_ratios(corpus, members)
    assert irr is not None
    random = lcn_py.random_baseline(corpus, [h.members for h in found], seed=7)
    assert [len(r) for r in random] == [len(h) for h in found]

    try:
        lcn_py.detect(corpus, theta=0.0)
    except ValueError as e:
        assert "theta" in str(e)
    else:
        raise AssertionError("invalid theta accepted")

    print(f"ok: {len(found)} HCCs, F1 {f1:.3f}, {lcn.vertex_count} LCN vertices")


if __name__ == "__main__":
    main()
