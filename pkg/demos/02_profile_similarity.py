"""Score candidate profiles against a genuine account and issue verdicts.

Run: python demos/02_profile_similarity.py
"""

from doppel.records import ProfileRecord
from doppel.similarity import PhotoOracle, assess_profile, msf_lsf, text_cosine

genuine = ProfileRecord(
    username="barackobama",
    full_name="Barack Obama",
    biography="dad husband president citizen",
    photo_id="ph_genuine",
    is_verified=True,
)

candidates = [
    ProfileRecord(username="barack__obama", full_name="Barack Obama",
                  biography="dad husband president citizen", photo_id="ph_close"),
    ProfileRecord(username="obama_fanpage", full_name="Obama Fans",
                  biography="daily obama content", photo_id="ph_fan"),
    ProfileRecord(username="xq_promo_21", full_name="Promo Hub",
                  biography="deals deals deals", photo_id="ph_bot"),
]

# the photo oracle is an external lookup table of face-match verdicts
oracle = PhotoOracle({
    ("ph_close", "ph_genuine"): True,
    ("ph_fan", "ph_genuine"): True,
    ("ph_bot", "ph_genuine"): False,
})

print(f"pairwise cosine example: {text_cosine('abcd', 'bcde'):.4f} (= 2/3)\n")
print(f"{'candidate':<16}{'user':>7}{'name':>7}{'bio':>7}{'photo':>7}{'count':>7}  verdict")
for cand in candidates:
    rep = assess_profile(cand, genuine, threshold=0.30, oracle=oracle)
    verdict = "IMPERSONATOR" if rep.is_impersonator else "unrelated"
    print(f"{cand.username:<16}{rep.sim_username:>7.2f}{rep.sim_full_name:>7.2f}"
          f"{rep.sim_biography:>7.2f}{str(rep.photo_similar):>7}"
          f"{rep.similar_feature_count:>7}  {verdict}")

# MSF/LSF summarize ONE candidate across SEVERAL genuine targets
second_target = ProfileRecord(username="obamafoundation", full_name="Obama Foundation",
                              biography="community programs worldwide", photo_id="ph_org")
reports = [
    assess_profile(candidates[0], genuine, oracle=oracle),
    assess_profile(candidates[0], second_target, oracle=oracle),
]
msf, lsf = msf_lsf(reports)
print(f"\n{candidates[0].username} across two targets: "
      f"most similar features {msf}, least {lsf}")
