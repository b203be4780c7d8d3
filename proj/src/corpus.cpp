#include "ddft/corpus.hpp"
#include <algorithm>

namespace ddft {

namespace {

struct ConceptText {
    const char* id;
    const char* body;
};

constexpr ConceptText kConcepts[] = {
    {"impressionism",
     "Impressionism is a painting movement that emerged in France in the 1860s and 1870s. "
     "Its practitioners worked quickly, often outdoors, to capture the changing effects of "
     "light and atmosphere. "
     "Claude Monet's painting Impression, Sunrise, shown in 1874, gave the movement its name. "
     "The first group exhibition was organized in Paris in 1874 by artists rejected from the "
     "official Salon. "
     "Core members included Monet, Pierre-Auguste Renoir, Camille Pissarro, and Berthe "
     "Morisot. "
     "Impressionist technique favors short, visible brushstrokes and unmixed color laid side "
     "by side. "
     "Subjects shifted from history and mythology toward everyday scenes, city streets, and "
     "landscapes. "
     "Critics initially used the word impressionist mockingly, but the painters adopted the "
     "label. "
     "The movement influenced later developments including Post-Impressionism and early "
     "abstraction. "
     "Major collections hang in the Musee d'Orsay in Paris and the Art Institute of Chicago."},
    {"natural_selection",
     "Natural selection is the mechanism of evolution proposed by Charles Darwin. "
     "Darwin presented the idea in On the Origin of Species, published in 1859. "
     "Alfred Russel Wallace independently arrived at a similar mechanism at nearly the same "
     "time. "
     "The mechanism requires variation among individuals, inheritance of traits, and "
     "differential reproductive success. "
     "Individuals whose heritable traits suit their environment tend to leave more "
     "offspring. "
     "Over many generations this shifts the composition of a population. "
     "The peppered moth in industrial England is a classic documented example of the "
     "process. "
     "Antibiotic resistance in bacteria is a modern instance observed directly in "
     "laboratories and hospitals. "
     "Natural selection acts on phenotypes, while the underlying variation is genetic. "
     "It is not a directed process; it has no goal beyond differential survival and "
     "reproduction."},
    {"recursion",
     "Recursion is a method where a function solves a problem by calling itself on smaller "
     "instances. "
     "A recursive definition needs at least one base case that terminates the descent. "
     "Without a reachable base case, recursion does not terminate and typically exhausts the "
     "call stack. "
     "The factorial function is a standard example: factorial of n is n times factorial of "
     "n minus one, with factorial of zero defined as one. "
     "Tree traversal is a natural recursive task because each subtree has the same shape as "
     "the whole. "
     "Divide-and-conquer algorithms such as mergesort and quicksort are recursive by design. "
     "Mergesort was described by John von Neumann in 1945. "
     "Any recursion can be rewritten as iteration with an explicit stack. "
     "Tail recursion allows some compilers to reuse the current stack frame. "
     "Recursion also appears in mathematics, for instance in the definition of the Fibonacci "
     "sequence."},
    {"harm_principle",
     "The harm principle holds that power may rightfully be exercised over an individual "
     "against their will only to prevent harm to others. "
     "John Stuart Mill articulated the principle in On Liberty, published in 1859. "
     "Under the principle, a person's own good is not a sufficient warrant for coercion. "
     "Mill distinguished self-regarding conduct from conduct that affects others. "
     "The principle is a cornerstone of liberal political philosophy. "
     "Seat belt laws are a frequently debated test case, since the main risk falls on the "
     "person coerced. "
     "Mill allowed exceptions for children and for those unable to judge their own "
     "interests. "
     "Critics argue that almost no action is purely self-regarding in a connected society. "
     "Later writers such as Joel Feinberg refined the principle into a family of "
     "liberty-limiting principles. "
     "The principle still frames modern debates over drug policy, speech, and public "
     "health mandates."},
    {"phoneme",
     "A phoneme is the smallest unit of sound that distinguishes one word from another in a "
     "language. "
     "Phonemes are abstract categories, not physical sounds; their concrete realizations are "
     "called allophones. "
     "Minimal pairs demonstrate phonemic contrast: in English, pat and bat differ only in "
     "their initial consonant. "
     "The English phonemes p and b differ in voicing. "
     "Languages differ in their phoneme inventories; English has roughly forty-four "
     "phonemes depending on dialect. "
     "Some languages use tones or clicks as phonemic contrasts. "
     "The concept was developed in early twentieth-century structural linguistics, with "
     "important contributions from the Prague School and Nikolai Trubetzkoy. "
     "Trubetzkoy's Principles of Phonology appeared in 1939. "
     "Phonemic analysis underlies alphabetic writing systems and pronunciation teaching. "
     "Speech recognition systems model phonemes statistically to map audio to words."},
    {"modus_ponens",
     "Modus ponens is a rule of inference in propositional logic. "
     "From the premises if P then Q, and P, it concludes Q. "
     "The name is Latin, short for modus ponendo ponens, the mode that affirms by "
     "affirming. "
     "It is a valid argument form: whenever both premises are true, the conclusion is "
     "true. "
     "A standard example: if it is raining, the street is wet; it is raining; therefore "
     "the street is wet. "
     "Modus ponens is distinct from the fallacy of affirming the consequent, which "
     "reasons invalidly from Q to P. "
     "The rule appears already in Stoic logic, attributed to Chrysippus in the third "
     "century BCE. "
     "In natural deduction systems it is often the primary elimination rule for the "
     "conditional. "
     "Automated theorem provers apply the rule mechanically during inference. "
     "Lewis Carroll's 1895 dialogue What the Tortoise Said to Achilles probes why the rule "
     "itself cannot be treated as just another premise."},
    {"derivative",
     "The derivative measures the instantaneous rate of change of a function. "
     "It is defined as the limit of the difference quotient as the increment approaches "
     "zero. "
     "Geometrically, the derivative at a point is the slope of the tangent line to the "
     "graph there. "
     "Isaac Newton and Gottfried Wilhelm Leibniz developed the calculus independently in "
     "the late seventeenth century. "
     "Leibniz's notation, dy over dx, remains standard today. "
     "The derivative of velocity with respect to time is acceleration, a basic application "
     "in physics. "
     "A function must be continuous at a point to be differentiable there, but continuity "
     "alone is not sufficient. "
     "The absolute value function is continuous at zero yet not differentiable there. "
     "Rules such as the product rule and chain rule reduce differentiation to mechanical "
     "steps. "
     "Derivatives underpin optimization, since interior extrema of differentiable functions "
     "occur where the derivative vanishes."},
    {"newtons_second_law",
     "Newton's second law states that the net force on a body equals its mass times its "
     "acceleration. "
     "Isaac Newton published the law in the Principia Mathematica in 1687. "
     "In its original form the law relates force to the rate of change of momentum. "
     "The familiar F equals m a form holds when mass is constant. "
     "Force and acceleration are vectors pointing in the same direction. "
     "The SI unit of force, the newton, is defined through this law as one kilogram meter "
     "per second squared. "
     "A practical example: a 1000 kilogram car accelerating at 2 meters per second squared "
     "requires a net force of 2000 newtons. "
     "The law holds in inertial reference frames. "
     "At speeds approaching light, special relativity replaces the constant-mass form. "
     "Engineering disciplines from vehicle design to rocketry apply the law constantly."},
};

}  // namespace

std::vector<ReferenceText> builtin_concepts() {
    std::vector<ReferenceText> out;
    out.reserve(std::size(kConcepts));
    for (const auto& concept_text : kConcepts)
        out.push_back(make_reference(concept_text.id, concept_text.body));
    // Same order as a directory load of the shipped files.
    std::sort(out.begin(), out.end(),
              [](const ReferenceText& a, const ReferenceText& b) {
                  return a.concept_id < b.concept_id;
              });
    return out;
}

}  // namespace ddft
