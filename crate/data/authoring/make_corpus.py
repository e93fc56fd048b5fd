#!/usr/bin/env python3
"""Authoring helper for data/corpus.tsv.

Sentences are built from hand-written templates and hand-written word-form
tables; every gendered slot lists its masculine and feminine surface forms
explicitly, so the four speaker/listener variants of each tuple are exact.

    python3 data/authoring/make_corpus.py > data/corpus.tsv
"""

import random
import sys

FATHA = "َ"
KASRA = "ِ"

PROFESSIONS = [
    ("طبيب", "طبيبة"), ("مهندس", "مهندسة"), ("معلم", "معلمة"), ("ممرض", "ممرضة"),
    ("طالب", "طالبة"), ("موظف", "موظفة"), ("كاتب", "كاتبة"), ("مدير", "مديرة"),
    ("لاعب", "لاعبة"), ("رسام", "رسامة"), ("مصور", "مصورة"), ("صحفي", "صحفية"),
    ("محاسب", "محاسبة"), ("طباخ", "طباخة"), ("باحث", "باحثة"), ("مترجم", "مترجمة"),
    ("مبرمج", "مبرمجة"), ("فنان", "فنانة"), ("محامي", "محامية"), ("مدرب", "مدربة"),
    ("سائق", "سائقة"), ("بائع", "بائعة"), ("مغني", "مغنية"), ("زميل", "زميلة"),
]

ADJECTIVES = [
    ("سعيد", "سعيدة"), ("متعب", "متعبة"), ("مستعد", "مستعدة"), ("جائع", "جائعة"),
    ("حزين", "حزينة"), ("مشغول", "مشغولة"), ("متأكد", "متأكدة"), ("فخور", "فخورة"),
    ("جاهز", "جاهزة"), ("مريض", "مريضة"), ("قلق", "قلقة"), ("ممتن", "ممتنة"),
    ("مسرور", "مسرورة"), ("متحمس", "متحمسة"), ("مرتاح", "مرتاحة"), ("وحيد", "وحيدة"),
    ("خائف", "خائفة"), ("محظوظ", "محظوظة"), ("غاضب", "غاضبة"), ("عطشان", "عطشى"),
    ("متفائل", "متفائلة"), ("مهتم", "مهتمة"), ("موافق", "موافقة"), ("آسف", "آسفة"),
]

QUALITIES = [
    ("جديد", "جديدة"), ("مجتهد", "مجتهدة"), ("نشيط", "نشيطة"), ("ذكي", "ذكية"),
    ("ماهر", "ماهرة"), ("ناجح", "ناجحة"),
]

VERBS = [
    ("تعمل", "تعملين", "في المستشفى"), ("تحب", "تحبين", "القهوة"),
    ("تشرب", "تشربين", "الشاي"), ("تريد", "تريدين", "المساعدة"),
    ("تسكن", "تسكنين", "في المدينة"), ("تدرس", "تدرسين", "الطب"),
    ("تعرف", "تعرفين", "الطريق"), ("تفهم", "تفهمين", "السؤال"),
    ("تذهب", "تذهبين", "إلى العمل"), ("تكتب", "تكتبين", "رسالة"),
    ("تقرأ", "تقرئين", "الكتاب"), ("تسمع", "تسمعين", "الموسيقى"),
    ("تستطيع", "تستطيعين", "السباحة"), ("تحتاج", "تحتاجين", "إلى شيء"),
    ("تنتظر", "تنتظرين", "الحافلة"), ("تلعب", "تلعبين", "كرة القدم"),
    ("تأكل", "تأكلين", "الخبز"), ("تفكر", "تفكرين", "في المستقبل"),
]

IMPERATIVES = [
    ("اذهب", "اذهبي", "إلى البيت"), ("تعال", "تعالي", "إلى هنا"),
    ("اجلس", "اجلسي", "هنا"), ("انتظر", "انتظري", "قليلا"),
    ("اكتب", "اكتبي", "اسمك"), ("اسمع", "اسمعي", "هذه الأغنية"),
    ("ارجع", "ارجعي", "غدا"), ("اشرب", "اشربي", "الماء"),
    ("كل", "كلي", "الطعام"), ("خذ", "خذي", "هذا الكتاب"),
    ("افتح", "افتحي", "الباب"), ("قل", "قولي", "الحقيقة"),
    ("نم", "نامي", "مبكرا"), ("اقرأ", "اقرئي", "الرسالة"),
]

VOCATIVES = [
    ("عزيزي", "عزيزتي"), ("صديقي", "صديقتي"), ("أخي", "أختي"),
    ("حبيبي", "حبيبتي"), ("زميلي", "زميلتي"), ("جاري", "جارتي"),
]

NEGATED = [("تقلق", "تقلقي"), ("تخف", "تخافي"), ("تحزن", "تحزني"), ("تتأخر", "تتأخري")]

DUAL_STEMS = [
    ("معلم", "معلمت"), ("طبيب", "طبيبت"), ("مدير", "مديرت"), ("صديق", "صديقت"),
    ("جار", "جارت"), ("زميل", "زميلت"), ("مدرب", "مدربت"), ("مساعد", "مساعدت"),
]

NEUTRAL = [
    "ذهبنا إلى السوق أمس .", "الجو جميل اليوم .", "هو طبيب ماهر .",
    "هي ممرضة في المستشفى .", "الطالب يقرأ الكتاب في المكتبة .",
    "هذه المدينة كبيرة جدا .", "وصل القطار في الموعد .", "المطعم مغلق يوم الجمعة .",
    "هي مهندسة ناجحة .", "هو معلم جديد في المدرسة .", "سافر أخوه إلى القاهرة .",
    "نحن نحب القهوة العربية .", "الكتاب على الطاولة .", "أين محطة الحافلات ؟",
    "كم الساعة الآن ؟", "الامتحان صعب هذا العام .", "اشترت أمي خبزا طازجا .",
    "هي كاتبة مشهورة .", "هو لاعب في الفريق الوطني .", "البحر هادئ هذا الصباح .",
    "درسنا الرياضيات مع المعلم .", "يعمل أبي في البنك .", "تفتح المكتبة في التاسعة .",
    "هي طالبة في الجامعة .", "هو موظف في الشركة .", "الحديقة مليئة بالأزهار .",
    "مرحبا بكم في المؤتمر .", "الطريق طويل إلى القرية .", "أكلنا السمك على العشاء .",
    "هي مديرة المدرسة .", "هو سعيد بالنتيجة .", "هي متعبة بعد العمل .",
]


def S(pair, prefix=""):
    return ("S", pair, prefix)


def L(pair, prefix=""):
    return ("L", pair, prefix)


def D(stems):
    return ("D", stems, "")


def build_templates(rng):
    p = lambda: rng.choice(PROFESSIONS)
    a = lambda: rng.choice(ADJECTIVES)
    q = lambda: rng.choice(QUALITIES)
    v = lambda: rng.choice(VERBS)
    i = lambda: rng.choice(IMPERATIVES)
    voc = lambda: rng.choice(VOCATIVES)

    def t_doctor_nurse():
        return ["أنا", S(p()), "وأنت", L(p())]

    def t_adj_today():
        return ["أنا", S(a()), "جدا", "اليوم", "."]

    def t_are_you():
        return ["هل", "أنت", L(a()), "؟"]

    def t_voc_verb():
        verb = v()
        return [L(voc()), "،", "هل", L(verb[:2])] + verb[2].split() + ["؟"]

    def t_voc_imp():
        imp = i()
        return [L(voc()), "،", L(imp[:2])] + imp[2].split() + ["."]

    def t_thanks():
        return ["شكرا", "يا", L(voc()), "."]

    def t_know_you():
        return ["أعرف", "أنك", L(a()), "."]

    def t_feel():
        return ["أشعر", "أنني", S(a()), "."]

    def t_prof_quality():
        return ["أنا", S(p()), S(q()), "في", "هذه", "الشركة", "."]

    def t_dual():
        return ["أنا", D(rng.choice(DUAL_STEMS)), "،", "لا", L(rng.choice(NEGATED)), "."]

    def t_verb_voc():
        verb = v()
        return ["هل", L(verb[:2])] + verb[2].split() + ["يا", L(voc()), "؟"]

    def t_two_adj():
        first, second = rng.sample(ADJECTIVES, 2)
        return ["أنا", S(first), S(second, "و"), "."]

    def t_why():
        return ["لماذا", "أنت", L(a()), "؟"]

    def t_you_prof():
        return ["أنت", L(p()), L(q()), "."]

    def t_third_and_me():
        m, f = p()
        return ["هي", f, "وأنا", S(p()), "."]

    def t_not():
        return ["أنا", "لست", S(a()), "."]

    def t_me_you_adj():
        return ["أنا", S(a()), "وأنت", L(a()), "أيضا", "."]

    return [
        (t_doctor_nurse, 22), (t_adj_today, 18), (t_are_you, 18), (t_voc_verb, 16),
        (t_voc_imp, 18), (t_thanks, 8), (t_know_you, 12), (t_feel, 12),
        (t_prof_quality, 14), (t_dual, 16), (t_verb_voc, 14), (t_two_adj, 12),
        (t_why, 8), (t_you_prof, 12), (t_third_and_me, 10), (t_not, 10),
        (t_me_you_adj, 12),
    ]


def realize(parts, speaker, listener):
    """Surface tokens and label codes for one (speaker, listener) realization."""
    tokens, labels = [], []
    for part in parts:
        if isinstance(part, str):
            tokens.extend(part.split())
            labels.extend(["N"] * len(part.split()))
            continue
        kind, forms, prefix = part
        if kind == "S":
            tokens.append(prefix + forms[0 if speaker == "M" else 1])
            labels.append("1" + speaker)
        elif kind == "L":
            tokens.append(prefix + forms[0 if listener == "M" else 1])
            labels.append("2" + listener)
        else:
            stem = forms[0 if speaker == "M" else 1]
            clitic = "ك" + (FATHA if listener == "M" else KASRA)
            tokens.append(stem + clitic)
            labels.append("1" + speaker + "+2" + listener)
    return tokens, labels


def main():
    rng = random.Random(20221012)
    blocks = []
    seen = set()

    def emit(parts, base_s, base_l):
        base, labels = realize(parts, base_s, base_l)
        key = " ".join(base)
        if key in seen:
            return False
        seen.add(key)
        lines = [f"#id\tt{len(blocks) + 1:04d}", "B\t" + key, "L\t" + " ".join(labels)]
        for s in "MF":
            for l in "MF":
                lines.append(f"{s}{l}\t" + " ".join(realize(parts, s, l)[0]))
        blocks.append("\n".join(lines))
        return True

    # The motivating sentence, masculine speaker and feminine listener.
    emit(["أنا", S(("طبيب", "طبيبة")), "وأنت", L(("ممرض", "ممرضة"))], "M", "F")

    for make, count in build_templates(rng):
        made = 0
        attempts = 0
        while made < count and attempts < count * 20:
            attempts += 1
            if emit(make(), rng.choice("MF"), rng.choice("MF")):
                made += 1

    for sentence in NEUTRAL:
        emit([sentence], "M", "M")

    sys.stdout.write("\n\n".join(blocks) + "\n")


if __name__ == "__main__":
    main()
