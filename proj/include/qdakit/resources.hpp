// Copyright 2026 The qdakit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Bundled default tables. Projects may override each of them with files.

#pragma once

#include <array>
#include <string_view>
#include <utility>

namespace qdakit::resources {

// contraction,longhand
inline constexpr std::string_view kContractionsCsv = R"(contraction,longhand
ain't,am not
aren't,are not
can't,cannot
could've,could have
couldn't,could not
didn't,did not
doesn't,does not
don't,do not
hadn't,had not
hasn't,has not
haven't,have not
he'd,he would
he'll,he will
he's,he is
how'd,how did
how'll,how will
how's,how is
i'd,i would
i'll,i will
i'm,i am
i've,i have
isn't,is not
it'd,it would
it'll,it will
it's,it is
let's,let us
ma'am,madam
mightn't,might not
might've,might have
mustn't,must not
must've,must have
needn't,need not
o'clock,of the clock
shan't,shall not
she'd,she would
she'll,she will
she's,she is
should've,should have
shouldn't,should not
that'd,that would
that's,that is
there'd,there would
there's,there is
they'd,they would
they'll,they will
they're,they are
they've,they have
wasn't,was not
we'd,we would
we'll,we will
we're,we are
we've,we have
weren't,were not
what'd,what did
what'll,what will
what're,what are
what's,what is
what've,what have
when's,when is
where'd,where did
where's,where is
who'd,who would
who'll,who will
who's,who is
who've,who have
why'd,why did
why's,why is
won't,will not
would've,would have
wouldn't,would not
you'd,you would
you'll,you will
you're,you are
you've,you have
)";

// Lowercase words (without the final period) after which a period never
// ends a sentence.
inline constexpr std::array<std::string_view, 25> kAbbreviations = {
    "dr",  "mr",  "mrs",    "ms",   "prof", "st",  "sr",  "jr",   "vs",
    "etc", "e.g", "i.e",    "approx", "dept", "fig", "vol", "inc", "ltd",
    "jan", "feb", "aug",    "sept", "oct",  "nov", "dec"};

// Irregular inflections mapped to base forms; used by the draft vocabulary
// grouping alongside suffix stripping.
inline constexpr std::array<std::pair<std::string_view, std::string_view>, 40>
    kIrregularForms = {{
        {"came", "come"},     {"went", "go"},        {"gone", "go"},
        {"was", "be"},        {"were", "be"},        {"been", "be"},
        {"had", "have"},      {"did", "do"},         {"done", "do"},
        {"said", "say"},      {"made", "make"},      {"took", "take"},
        {"taken", "take"},    {"gave", "give"},      {"given", "give"},
        {"got", "get"},       {"gotten", "get"},     {"saw", "see"},
        {"seen", "see"},      {"knew", "know"},      {"known", "know"},
        {"thought", "think"}, {"told", "tell"},      {"felt", "feel"},
        {"kept", "keep"},     {"left", "leave"},     {"brought", "bring"},
        {"bought", "buy"},    {"found", "find"},     {"began", "begin"},
        {"begun", "begin"},   {"wrote", "write"},    {"written", "write"},
        {"children", "child"}, {"women", "woman"},   {"men", "man"},
        {"better", "good"},   {"worse", "bad"},      {"ran", "run"},
        {"sent", "send"},
    }};

// Small excerpts of the content-analysis word lists. Yes/no forms are
// matched case-sensitively; the other lists are matched on folded tokens.
inline constexpr std::string_view kYesWords = "yes\nYes\n";
inline constexpr std::string_view kNoWords = "no\nNo\n";
inline constexpr std::string_view kNegationWords =
    "not\nnever\nnobody\nnothing\nneither\nnor\nnone\ncannot\nwithout\n";
inline constexpr std::string_view kAmplifierWords =
    "very\nreally\nextremely\nhighly\nabsolutely\ncompletely\ndefinitely\n"
    "especially\ntotally\nmost\nseverely\n";
inline constexpr std::string_view kDeamplifierWords =
    "slightly\nbarely\nhardly\nrarely\nsomewhat\nsometimes\nlittle\nfew\n"
    "seldom\nkind-of\n";
inline constexpr std::string_view kPositiveWords =
    "good\nbetter\nbest\neffective\nhelpful\nimprove\nimproved\nrecover\n"
    "recovered\nsafe\nsuccess\nwell\n";
inline constexpr std::string_view kNegativeWords =
    "bad\nworse\nworst\nrisk\nsevere\nproblem\ndanger\ndangerous\nfail\n"
    "failed\ncomplication\nresistance\n";

}  // namespace qdakit::resources
